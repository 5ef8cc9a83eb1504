"""Basic clopen sets of the compactified space and the finite-cover decision.

A basic set is a singleton tree node, a full cone, or a cone with the apex
and finitely many child cones removed.  Finitely presented families of
basic sets can be decided for covering by testing a finite profile-complete
set of representative points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .sequences import (
    DEFAULT_BUDGET,
    AugmentedPoint,
    DepthBudget,
    FinitePoint,
    InfinitePoint,
    PeriodicPoint,
    Point,
    Seq,
    cone_member,
    is_prefix,
    weight,
)
from .metric import Dyadic, EpsilonSchedule, weight_schedule


@dataclass(frozen=True)
class Singleton:
    t: Seq


@dataclass(frozen=True)
class Cone:
    t: Seq


@dataclass(frozen=True)
class ConeMinus:
    """The cone at t minus the apex and the child cones j < i."""

    t: Seq
    i: int


BasicClopen = Singleton | Cone | ConeMinus


def basic_member(B: BasicClopen, p: Point, budget: DepthBudget | None = None) -> bool:
    budget = budget or DEFAULT_BUDGET
    if isinstance(B, Singleton):
        return isinstance(p, FinitePoint) and p.seq == B.t
    if isinstance(B, Cone):
        return cone_member(B.t, p, budget)
    if not cone_member(B.t, p, budget):
        return False
    if isinstance(p, FinitePoint) and p.seq == B.t:
        return False
    for j in range(B.i):
        if cone_member(B.t + (j,), p, budget):
            return False
    return True


def _mentioned_bounds(family: list[BasicClopen]) -> tuple[int, int]:
    max_len = 0
    max_entry = -1
    for B in family:
        t = B.t
        max_len = max(max_len, len(t) + (1 if isinstance(B, ConeMinus) else 0))
        for e in t:
            max_entry = max(max_entry, e)
        if isinstance(B, ConeMinus):
            max_entry = max(max_entry, B.i)
    return 1 + max_len, 1 + max_entry


def _words_upto(depth: int, max_entry: int, base: Seq = ()) -> Iterator[Seq]:
    # Extensions of base, canonical order (weight, then shorter, then lex).
    pool = sorted(
        (w for w in _all_words(depth, max_entry)),
        key=lambda w: (weight(w), len(w), w),
    )
    for w in pool:
        yield base + w


def _all_words(depth: int, max_entry: int) -> Iterator[Seq]:
    def rec(prefix: Seq):
        yield prefix
        if len(prefix) < depth:
            for e in range(max_entry + 1):
                yield from rec(prefix + (e,))

    yield from rec(())


def representatives(family: list[BasicClopen], base: Seq = ()) -> Iterator[Point]:
    """Profile-complete finite set of test points for the family within the
    cone at ``base``: membership of any point of that cone in any member is
    determined by its short, entry-clamped profile."""
    D, M = _mentioned_bounds(family)
    for u in _words_upto(D + 1, M, base):
        yield FinitePoint(u)
        yield AugmentedPoint(u)
    for u in _words_upto(D + 1, M, base):
        if len(u) == len(base) + D + 1:
            yield PeriodicPoint(u, (0,))


@dataclass(frozen=True)
class Covers:
    pass


@dataclass(frozen=True)
class Counterexample:
    point: Point


def _covered(family: list[BasicClopen], p: Point) -> bool:
    return any(basic_member(B, p) for B in family)


def cover_decide(family: list[BasicClopen]) -> Covers | Counterexample:
    """Decide whether the family covers the whole space; the witness point is
    the first uncovered representative in canonical order."""
    for p in representatives(family):
        if not _covered(family, p):
            return Counterexample(p)
    return Covers()


def covers_cone(family: list[BasicClopen], t: Seq) -> bool:
    return all(_covered(family, p) for p in representatives(family, base=t))


def uncovered_descent(family: list[BasicClopen]) -> Point:
    """Replay the compactness recursion: starting at the root, walk into a
    child cone that the family fails to cover, emitting the first concretely
    uncovered point met along the way."""
    if covers_cone(family, ()):
        raise ValueError("family covers the space; descent has no start")
    D, _ = _mentioned_bounds(family)
    t: Seq = ()
    while len(t) <= D + 1:
        if not _covered(family, FinitePoint(t)):
            return FinitePoint(t)
        if not _covered(family, AugmentedPoint(t)):
            return AugmentedPoint(t)
        # Some member contains the augmented apex; it must be a ConeMinus at
        # t, so the uncovered part hides in its removed child cones.
        bound = max(
            B.i
            for B in family
            if isinstance(B, ConeMinus) and B.t == t and basic_member(B, AugmentedPoint(t))
        )
        for j in range(bound):
            if not covers_cone(family, t + (j,)):
                t = t + (j,)
                break
        else:
            raise AssertionError("no uncovered child cone despite uncovered parent")
    return PeriodicPoint(t, (0,))


def neighborhood_of(
    p: Point,
    eps: Dyadic,
    schedule: EpsilonSchedule | None = None,
    budget: DepthBudget | None = None,
) -> BasicClopen:
    """A basic set containing p of metric diameter below eps."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    if isinstance(p, FinitePoint):
        return Singleton(p.seq)
    if isinstance(p, AugmentedPoint):
        t = p.seq
        for i in range(budget.branch + 1):
            if schedule(t + (i,)) < eps:
                return ConeMinus(t, i)
        raise BudgetExceeded_from(budget)
    for i in range(budget.depth + 1):
        prefix = p.restrict(i, budget).seq
        if schedule(prefix) < eps:
            return Cone(prefix)
    raise BudgetExceeded_from(budget)


def BudgetExceeded_from(budget: DepthBudget):
    from .sequences import BudgetExceeded

    return BudgetExceeded(f"no small enough basic set within budget {budget}")
