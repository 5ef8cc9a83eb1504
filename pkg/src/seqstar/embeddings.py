"""Meet-preserving tree self-embeddings: validation, amalgamation, extension.

An embedding is presented by its root image and a successor rule and is
evaluated lazily with an internal memo.  Two local conditions are enforced
as values are computed: each child image strictly extends the parent image,
and sibling images diverge at the parent image's length.  Together these
are equivalent to meet preservation plus injectivity, which the brute-force
oracle below checks independently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .sequences import (
    DEFAULT_BUDGET,
    AugmentedPoint,
    BudgetExceeded,
    DepthBudget,
    FinitePoint,
    InfinitePoint,
    Point,
    Seq,
    is_prefix,
    meet,
    nodes_in_range,
)


class InvalidEmbedding(Exception):
    def __init__(self, message: str, node: Seq | None = None):
        super().__init__(message)
        self.node = node


class ContainmentError(Exception):
    """An amalgamation factor left its assigned cone."""

    def __init__(self, node: Seq, factor: Seq, image: Seq):
        super().__init__(f"factor at {factor} produced {image} outside its cone (node {node})")
        self.node = node
        self.factor = factor
        self.image = image


class MeetEmbedding:
    """A meet embedding given by root image and successor rule.

    ``rule(t, i)`` must return the image of ``t + (i,)``; it may consult the
    already-computed image of ``t`` through ``apply``.  Rules must be pure;
    the memo then behaves as a transparent cache.
    """

    def __init__(self, root: Seq, rule: Callable[[Seq, int], Seq], name: str = ""):
        self.root = tuple(root)
        self._rule = rule
        self.name = name
        self._memo: dict[Seq, Seq] = {(): self.root}
        self._fork: dict[Seq, dict[int, int]] = {}

    def apply(self, t: Seq) -> Seq:
        got = self._memo.get(t)
        if got is not None:
            return got
        parent_img = self.apply(t[:-1])
        img = tuple(self._rule(t[:-1], t[-1]))
        if not (is_prefix(parent_img, img) and len(img) > len(parent_img)):
            raise InvalidEmbedding(
                f"image {img} of {t} does not strictly extend parent image {parent_img}",
                node=t,
            )
        forks = self._fork.setdefault(t[:-1], {})
        coord = img[len(parent_img)]
        other = forks.get(coord)
        if other is not None and other != t[-1]:
            raise InvalidEmbedding(
                f"siblings {other} and {t[-1]} of {t[:-1]} share divergence coordinate {coord}",
                node=t[:-1],
            )
        forks[coord] = t[-1]
        self._memo[t] = img
        return img

    def __call__(self, t: Seq) -> Seq:
        return self.apply(t)

    def compose(self, other: "MeetEmbedding") -> "MeetEmbedding":
        """self after other (apply other first)."""
        outer, inner = self, other

        def rule(t: Seq, i: int) -> Seq:
            return outer.apply(inner.apply(t + (i,)))

        e = MeetEmbedding(outer.apply(inner.apply(())), rule,
                          name=f"{outer.name or 'outer'}∘{inner.name or 'inner'}")
        return e

    def root_node(self) -> Seq:
        return ()

    @classmethod
    def prefix(cls, s: Seq) -> "MeetEmbedding":
        s = tuple(s)
        return cls(s, lambda t, i, _s=s: _s + t + (i,), name=f"prefix{list(s)}")

    @classmethod
    def identity(cls) -> "MeetEmbedding":
        return cls((), lambda t, i: t + (i,), name="id")

    @classmethod
    def from_node_map(cls, node_map: Callable[[Seq], Seq], name: str = "") -> "MeetEmbedding":
        return cls(node_map(()), lambda t, i: node_map(t + (i,)), name=name)

    @classmethod
    def from_table(cls, table: Mapping[Seq, Seq], name: str = "table") -> "MeetEmbedding":
        """Finite node table; children outside the table extend by the
        identity successor step on top of the computed parent image."""
        tbl = {tuple(k): tuple(v) for k, v in table.items()}

        def rule(t: Seq, i: int, _e_ref=[]) -> Seq:
            child = t + (i,)
            if child in tbl:
                return tbl[child]
            return _e_ref[0].apply(t) + (i,)

        root = tbl.get((), ())
        e = cls(root, rule, name=name)
        rule.__defaults__ = ([e],)
        return e

    @classmethod
    def from_child_words(
        cls, root: Seq, word: Callable[[Seq, int], Seq], name: str = "child_word"
    ) -> "MeetEmbedding":
        """Successor images image(t)+word(t, i); the word must be nonempty
        with per-node injective first coordinates."""

        def rule(t: Seq, i: int, _e_ref=[]) -> Seq:
            return _e_ref[0].apply(t) + tuple(word(t, i))

        e = cls(root, rule, name=name)
        rule.__defaults__ = ([e],)
        return e


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Violation:
    t: Seq
    i: int
    j: int | None = None


def validate(
    candidate: Mapping[Seq, Seq] | Callable[[Seq], Seq], depth: int, branch: int
) -> Valid | Violation:
    """Check the two local embedding conditions exhaustively in range."""
    get = candidate.__getitem__ if isinstance(candidate, Mapping) else candidate
    for t in nodes_in_range(depth - 1, branch):
        pi_t = tuple(get(t))
        n = len(pi_t)
        coords: dict[int, int] = {}
        for i in range(branch):
            img = tuple(get(t + (i,)))
            if not (is_prefix(pi_t, img) and len(img) > n):
                return Violation(t, i)
            c = img[n]
            if c in coords:
                return Violation(t, coords[c], i)
            coords[c] = i
    return Valid()


@dataclass(frozen=True)
class Agrees:
    pass


@dataclass(frozen=True)
class Disagrees:
    s: Seq
    t: Seq


def meet_preservation_oracle(
    candidate: Mapping[Seq, Seq] | Callable[[Seq], Seq], depth: int, branch: int
) -> Agrees | Disagrees:
    """Independent brute-force check: meets are preserved and the map is
    injective over every pair of nodes in range."""
    get = candidate.__getitem__ if isinstance(candidate, Mapping) else candidate
    nodes = nodes_in_range(depth, branch)
    imgs = [tuple(get(t)) for t in nodes]
    img_of = dict(zip(nodes, imgs))
    for a in range(len(nodes)):
        s, ps = nodes[a], imgs[a]
        for b in range(a + 1, len(nodes)):
            t, pt = nodes[b], imgs[b]
            if ps == pt:
                return Disagrees(s, t)
            r = meet(s, t)
            pr = img_of[r]
            if meet(ps, pt) != pr:
                return Disagrees(s, t)
    return Agrees()


class EmbeddingFamily:
    """Node-indexed family of embeddings, each mapping into the cone at its
    index node."""

    def __init__(self, assign: Callable[[Seq], MeetEmbedding]):
        self._assign = assign
        self._memo: dict[Seq, MeetEmbedding] = {}

    def __call__(self, t: Seq) -> MeetEmbedding:
        if t not in self._memo:
            self._memo[t] = self._assign(t)
        return self._memo[t]


def amalgamate(family: EmbeddingFamily, depth: int, branch: int) -> MeetEmbedding:
    """Product of the family: the factor at the node itself applies first,
    then successively shorter prefixes, the root factor last."""

    def node_map(t: Seq) -> Seq:
        result = t
        for n in range(len(t), -1, -1):
            factor = family(t[:n])
            if not is_prefix(t[:n], factor.root):
                raise ContainmentError(t, t[:n], factor.root)
            result = factor.apply(result)
            if not is_prefix(t[:n], result):
                raise ContainmentError(t, t[:n], result)
        return result

    amalgam = MeetEmbedding.from_node_map(node_map, name="amalgam")
    # Touch the whole range so containment violations surface eagerly.
    for t in nodes_in_range(depth, branch):
        amalgam.apply(t)
    return amalgam


def extend(pi: MeetEmbedding, p: Point, budget: DepthBudget | None = None) -> Point:
    """The unique continuous extension of pi to the compactified space."""
    budget = budget or DEFAULT_BUDGET
    if isinstance(p, FinitePoint):
        return FinitePoint(pi.apply(p.seq))
    if isinstance(p, AugmentedPoint):
        return AugmentedPoint(pi.apply(p.seq))

    def prefix_fn(k: int) -> Seq:
        i = 0
        steps = 0
        while True:
            img = pi.apply(p.restrict(i, budget).seq)
            if len(img) >= k:
                return img[:k]
            i += 1
            steps += 1
            if steps > budget.steps or i > budget.depth:
                raise BudgetExceeded(f"extension prefix {k} not reached within budget")

    return InfinitePoint(prefix_fn, label=f"{pi.name or 'pi'}^({p!r})")


@dataclass(frozen=True)
class Empty:
    """No preimage found; range_limited marks that the search was bounded."""

    range_limited: bool = True


def preimage_cone(
    pi: MeetEmbedding, t: Seq, depth: int, branch: int
) -> "ConeResult":
    """Minimal-length s with t below the image of s, searched within range."""
    from .topology import Cone

    t = tuple(t)
    frontier: list[Seq] = [()]
    while frontier:
        next_frontier: list[Seq] = []
        for s in frontier:
            img = pi.apply(s)
            if is_prefix(t, img):
                return Cone(s)
            if not is_prefix(img, t):
                continue  # incomparable; no extension of s can reach t
            if len(s) < depth:
                next_frontier.extend(s + (i,) for i in range(branch))
        frontier = next_frontier
    return Empty()


ConeResult = "Cone | Empty"
