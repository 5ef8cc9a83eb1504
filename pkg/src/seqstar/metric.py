"""The exact dyadic ultrametric on the compactified sequence space.

Distances and radii are dyadic rationals m * 2^-k, compared exactly; no
floating point is used anywhere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .sequences import (
    DEFAULT_BUDGET,
    DepthBudget,
    Point,
    Seq,
    Undetermined,
    nodes_in_range,
    points_definitely_equal,
    split_index,
    weight,
)


class Dyadic:
    """A nonnegative rational m * 2^-k with m odd or zero (canonical form)."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if num < 0:
            raise ValueError("dyadics are nonnegative")
        while num and num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        if num == 0:
            exp = 0
        if exp < 0:
            num <<= -exp
            exp = 0
        self.num = num
        self.exp = exp

    @classmethod
    def zero(cls) -> "Dyadic":
        return cls(0)

    @classmethod
    def one(cls) -> "Dyadic":
        return cls(1)

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """2^k for k <= 0, or the integer 2^k for k > 0."""
        if k >= 0:
            return cls(1 << k)
        return cls(1, -k)

    def _cmp(self, other: "Dyadic") -> int:
        a = self.num << other.exp
        b = other.num << self.exp
        return (a > b) - (a < b)

    def __eq__(self, other):
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __hash__(self):
        return hash((self.num, self.exp))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __add__(self, other):
        e = max(self.exp, other.exp)
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    def __sub__(self, other):
        e = max(self.exp, other.exp)
        n = (self.num << (e - self.exp)) - (other.num << (e - other.exp))
        return Dyadic(n, e)

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.num * other, self.exp)
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def half(self) -> "Dyadic":
        return Dyadic(self.num, self.exp + 1)

    def is_zero(self) -> bool:
        return self.num == 0

    def abs_diff(self, other: "Dyadic") -> "Dyadic":
        return self - other if self >= other else other - self

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        if self.num == 1 and self.exp == 1:
            return "1/2"
        if self.num == 1:
            return f"2^-{self.exp}"
        return f"{self.num}·2^-{self.exp}"

    def __repr__(self):
        return f"Dyadic({self})"

    @classmethod
    def parse(cls, s: str) -> "Dyadic":
        s = s.strip().replace("*", "·")
        if re.fullmatch(r"\d+", s):
            return cls(int(s))
        m = re.fullmatch(r"(\d+)/(\d+)", s)
        if m:
            num, den = int(m.group(1)), int(m.group(2))
            if den & (den - 1) or den == 0:
                raise ValueError(f"denominator of {s!r} is not a power of two")
            return cls(num, den.bit_length() - 1)
        m = re.fullmatch(r"(?:(\d+)·)?2\^-(\d+)", s)
        if m:
            return cls(int(m.group(1) or 1), int(m.group(2)))
        raise ValueError(f"cannot parse dyadic {s!r}")


def dyadic_max(*xs: Dyadic) -> Dyadic:
    best = xs[0]
    for x in xs[1:]:
        if x > best:
            best = x
    return best


def dyadic_min(*xs: Dyadic) -> Dyadic:
    best = xs[0]
    for x in xs[1:]:
        if x < best:
            best = x
    return best


@dataclass(frozen=True)
class EpsilonSchedule:
    """A node-indexed family of positive dyadic radii, decreasing along the
    prefix order and vanishing per weight level."""

    name: str
    rule: Callable[[Seq], Dyadic]

    def __call__(self, t: Seq) -> Dyadic:
        return self.rule(t)

    def check(self, max_weight: int = 6, branch: int = 4) -> None:
        """Verify the schedule invariants on all nodes up to max_weight.

        Positivity and prefix-decrease are checked exactly; convergence is
        checked through strictly decreasing per-level maxima and
        nonincreasing child sequences, the finite shadows of the two limit
        conditions.
        """
        level_max: dict[int, Dyadic] = {}
        for t in nodes_in_range(max_weight, branch):
            w = weight(t)
            if w > max_weight:
                continue
            e = self.rule(t)
            if e.is_zero():
                raise ValueError(f"schedule not positive at {t}")
            if w not in level_max or e > level_max[w]:
                level_max[w] = e
            prev = None
            for j in range(branch):
                child = self.rule(t + (j,))
                if child > e:
                    raise ValueError(f"schedule increases from {t} to child {j}")
                if prev is not None and child > prev:
                    raise ValueError(f"child sequence not nonincreasing at {t}, j={j}")
                prev = child
        levels = sorted(level_max)
        for a, b in zip(levels, levels[1:]):
            if level_max[b] >= level_max[a]:
                raise ValueError(f"per-level maxima do not decrease ({a} -> {b})")


def weight_schedule() -> EpsilonSchedule:
    """The default schedule 2^-(len + sum of entries)."""
    return EpsilonSchedule("weight", lambda t: Dyadic(1, weight(t)))


SCHEDULES = {"weight": weight_schedule}


def epsilon(schedule: EpsilonSchedule, t: Seq) -> Dyadic:
    return schedule(t)


@dataclass(frozen=True)
class Exact:
    value: Dyadic


@dataclass(frozen=True)
class Bounded:
    """The true distance is at most ``upper`` (zero if the points are equal)."""

    upper: Dyadic


DistanceResult = Exact | Bounded


def distance(
    a: Point,
    b: Point,
    schedule: EpsilonSchedule | None = None,
    budget: DepthBudget | None = None,
) -> DistanceResult:
    """The ultrametric distance: max of the schedule over the two split-index
    restrictions that lie in the tree; zero on equal points."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    if points_definitely_equal(a, b):
        return Exact(Dyadic.zero())
    i = split_index(a, b, budget)
    if isinstance(i, Undetermined):
        common = a.restrict(i.depth, budget)
        # Agreement to the budget depth; if the common prefix carries the
        # infinity marker the points are equal augmented points, handled above.
        return Bounded(schedule(common.seq))
    candidates = []
    for p in (a, b):
        r = p.restrict(i, budget)
        if not r.marked:
            candidates.append(schedule(r.seq))
    if not candidates:
        raise AssertionError(
            "both split restrictions carry the infinity marker; "
            "impossible for distinct points"
        )
    return Exact(dyadic_max(*candidates))


def ball_member(
    center: Point,
    radius: Dyadic,
    p: Point,
    schedule: EpsilonSchedule | None = None,
    budget: DepthBudget | None = None,
) -> bool | Undetermined:
    """Membership of p in the open ball around center; Undetermined when a
    bounded distance does not settle it."""
    d = distance(center, p, schedule, budget)
    if isinstance(d, Exact):
        return d.value < radius
    if d.upper < radius:
        return True
    return Undetermined((budget or DEFAULT_BUDGET).depth)
