"""Finite sequences, points of the compactified sequence space, and their order structure.

Sequences over the naturals are plain tuples of ints.  Points come in three
variants: finite, infinity-augmented (a finite sequence followed by the
marker coordinate), and genuinely infinite, the last presented only through
a prefix oracle.  All values are immutable; prefix oracles must be pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

Seq = tuple[int, ...]

EMPTY: Seq = ()


class BudgetExceeded(Exception):
    """Raised when an operation runs out of its depth/branch/step allowance."""

    def __init__(self, message: str, stage: str | None = None, partial=None):
        super().__init__(message)
        self.stage = stage
        self.partial = partial


class DomainMismatch(Exception):
    """Raised when a point lies outside the domain of the requested map."""


@dataclass(frozen=True)
class DepthBudget:
    """Caps on how far lazy points and searches may be inspected."""

    depth: int = 64
    branch: int = 64
    steps: int = 100_000

    def __post_init__(self):
        if self.depth <= 0 or self.branch <= 0 or self.steps <= 0:
            raise ValueError("budget components must be positive")


DEFAULT_BUDGET = DepthBudget()


def is_prefix(s: Seq, t: Seq) -> bool:
    return len(s) <= len(t) and t[: len(s)] == s


def meet(s: Seq, t: Seq) -> Seq:
    """Longest common initial segment of s and t."""
    n = min(len(s), len(t))
    i = 0
    while i < n and s[i] == t[i]:
        i += 1
    return s[:i]


@dataclass(frozen=True)
class Prefix:
    """A restriction p|i; ``marked`` records that the last coordinate is the
    infinity marker and the prefix therefore lies outside the tree."""

    seq: Seq
    marked: bool = False


@dataclass(frozen=True)
class Undetermined:
    """Agreement of two points up to the inspected depth."""

    depth: int


class Point:
    """Base class for elements of the compactified space."""

    def restrict(self, i: int, budget: DepthBudget | None = None) -> Prefix:
        raise NotImplementedError


@dataclass(frozen=True)
class FinitePoint(Point):
    seq: Seq

    def restrict(self, i: int, budget: DepthBudget | None = None) -> Prefix:
        return Prefix(self.seq[:i])

    def __repr__(self):
        return f"FinitePoint({list(self.seq)})"


@dataclass(frozen=True)
class AugmentedPoint(Point):
    """The point t followed by the infinity coordinate."""

    seq: Seq

    def restrict(self, i: int, budget: DepthBudget | None = None) -> Prefix:
        if i <= len(self.seq):
            return Prefix(self.seq[:i])
        return Prefix(self.seq, marked=True)

    def __repr__(self):
        return f"AugmentedPoint({list(self.seq)})"


class InfinitePoint(Point):
    """An infinite sequence presented by a pure prefix oracle i -> b|i."""

    def __init__(self, prefix_fn: Callable[[int], Seq], label: str = ""):
        self._prefix_fn = prefix_fn
        self.label = label

    def restrict(self, i: int, budget: DepthBudget | None = None) -> Prefix:
        budget = budget or DEFAULT_BUDGET
        if i > budget.depth:
            raise BudgetExceeded(f"prefix query {i} exceeds depth budget {budget.depth}")
        p = self._prefix_fn(i)
        if len(p) != i:
            raise ValueError(f"prefix oracle returned length {len(p)} for query {i}")
        return Prefix(p)

    def __repr__(self):
        return f"InfinitePoint({self.label or self._prefix_fn})"


class PeriodicPoint(InfinitePoint):
    """Eventually periodic infinite point head + period^omega.

    The finite presentation makes equality decidable, which the metric layer
    uses to report exact zero distances.
    """

    def __init__(self, head: Seq, period: Seq):
        if not period:
            raise ValueError("period must be nonempty")
        self.head = tuple(head)
        self.period = tuple(period)
        super().__init__(self._prefix, label=f"{list(self.head)}+{list(self.period)}*")

    def _prefix(self, i: int) -> Seq:
        if i <= len(self.head):
            return self.head[:i]
        k = i - len(self.head)
        reps = k // len(self.period) + 1
        return self.head + (self.period * reps)[:k]

    def __eq__(self, other):
        if not isinstance(other, PeriodicPoint):
            return NotImplemented
        if self.head == other.head and self.period == other.period:
            return True
        # Different presentations can denote the same sequence; compare far
        # enough to cover both heads plus a full common period cycle.
        import math

        n = max(len(self.head), len(other.head))
        n += len(self.period) * len(other.period) // math.gcd(len(self.period), len(other.period))
        return self._prefix(n) == other._prefix(n)

    def __hash__(self):
        # Hash on a normalized prefix long enough to separate common cases.
        return hash(self._prefix(len(self.head) + 2 * len(self.period)))


def zeros() -> PeriodicPoint:
    return PeriodicPoint((), (0,))


def points_definitely_equal(a: Point, b: Point) -> bool:
    """True only when equality is certain from the finite presentations."""
    if a is b:
        return True
    if isinstance(a, FinitePoint) and isinstance(b, FinitePoint):
        return a.seq == b.seq
    if isinstance(a, AugmentedPoint) and isinstance(b, AugmentedPoint):
        return a.seq == b.seq
    if isinstance(a, PeriodicPoint) and isinstance(b, PeriodicPoint):
        return a == b
    return False


def restrict(p: Point, i: int, budget: DepthBudget | None = None) -> Prefix:
    return p.restrict(i, budget)


def split_index(a: Point, b: Point, budget: DepthBudget | None = None) -> int | Undetermined:
    """Least i with a|i != b|i, or Undetermined if they agree to the budget depth."""
    budget = budget or DEFAULT_BUDGET
    for i in range(1, budget.depth + 1):
        if a.restrict(i, budget) != b.restrict(i, budget):
            return i
    return Undetermined(budget.depth)


def cone_member(t: Seq, p: Point, budget: DepthBudget | None = None) -> bool:
    """True iff t is an initial segment of p."""
    r = p.restrict(len(t), budget)
    return not r.marked and r.seq == t if len(r.seq) == len(t) else False


def point_length(p: Point) -> int | None:
    """Length of the point, None meaning infinite."""
    if isinstance(p, FinitePoint):
        return len(p.seq)
    if isinstance(p, AugmentedPoint):
        return len(p.seq) + 1
    return None


def weight(t: Seq) -> int:
    """len(t) + sum of entries; strictly monotone along the prefix order."""
    return len(t) + sum(t)


def _nodes_of_weight(w: int) -> Iterator[Seq]:
    # Nodes of weight w in order: shorter first, then lexicographic.
    if w == 0:
        yield EMPTY
        return
    for length in range(1, w + 1):
        rest = w - length  # sum of entries
        yield from _compositions(length, rest)


def _compositions(length: int, total: int) -> Iterator[Seq]:
    if length == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for tail in _compositions(length - 1, total - first):
            yield (first,) + tail


_enum_cache: list[Seq] = []
_index_cache: dict[Seq, int] = {}
_enum_weight = -1


def _extend_enum(upto_weight: int) -> None:
    global _enum_weight
    while _enum_weight < upto_weight:
        _enum_weight += 1
        for t in _nodes_of_weight(_enum_weight):
            _index_cache[t] = len(_enum_cache)
            _enum_cache.append(t)


def canonical_enumeration(n: int) -> Seq:
    """The fixed prefix-monotone bijection index -> node.

    Nodes are ordered by weight, breaking ties by length (shorter first) and
    then lexicographically, so prefixes always precede their extensions.
    """
    w = _enum_weight
    while len(_enum_cache) <= n:
        w += 1
        _extend_enum(w)
    return _enum_cache[n]


def canonical_index(t: Seq) -> int:
    """Position of t in the canonical enumeration, in closed form.

    There are 2^(w-1) nodes of each positive weight w, so the block below
    weight w has size 2^(w-1); within the block, lengths come first
    (C(w-1, l-1) nodes of length l), then lexicographic rank.
    """
    import math

    w = weight(t)
    if w == 0:
        return 0
    L = len(t)
    idx = 1 << (w - 1)
    for l in range(1, L):
        idx += math.comb(w - 1, l - 1)
    rem = w - L  # entry sum still to distribute
    for pos in range(L - 1):
        slots = L - pos - 2  # free coordinates after this one (last is forced)
        for f in range(t[pos]):
            idx += math.comb(rem - f + slots, slots)
        rem -= t[pos]
    return idx


def enumerate_nodes() -> Iterator[Seq]:
    """All of the tree in canonical order."""
    n = 0
    while True:
        yield canonical_enumeration(n)
        n += 1


def nodes_in_range(depth: int, branch: int) -> list[Seq]:
    """All nodes with length <= depth and entries < branch, canonical order."""
    out: list[Seq] = [EMPTY]
    frontier: list[Seq] = [EMPTY]
    for _ in range(depth):
        frontier = [t + (e,) for t in frontier for e in range(branch)]
        out.extend(frontier)
    out.sort(key=lambda t: (weight(t), len(t), t))
    return out
