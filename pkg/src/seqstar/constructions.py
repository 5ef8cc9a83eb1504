"""Recursive embedding-building procedures driven by caller-supplied oracles.

Each operation builds a finite embedding table by bounded search, records
every oracle answer it relied on as an exact-dyadic certificate, and
returns the table together with a JSON-ready trace.  Traces can be
re-verified offline (see trace.recheck): re-running the named oracle on the
recorded queries must reproduce the certifying inequalities exactly.

Density is never decided, only witnessed: every "pick an extension inside
the dense set" step is a bounded search through canonically ordered words,
failing with BudgetExceeded when the allowance runs out.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .metric import Dyadic, EpsilonSchedule, Exact, distance, weight_schedule
from .sequences import (
    DEFAULT_BUDGET,
    AugmentedPoint,
    BudgetExceeded,
    DepthBudget,
    DomainMismatch,
    FinitePoint,
    PeriodicPoint,
    Point,
    Seq,
    is_prefix,
    nodes_in_range,
)
from .embeddings import MeetEmbedding, Valid, extend, meet_preservation_oracle, validate
from .serialize import node_key, point_to_json, table_to_json, value_to_json

Value = Any  # Dyadic or Point; equality/distance owned by the SpaceFunction


@dataclass
class TreeSetOracle:
    """A set of tree nodes given by a pure membership test, optionally with
    a density hint mapping each node to an extension inside the set."""

    name: str
    member: Callable[[Seq], bool]
    dense_extension: Callable[[Seq], Seq] | None = None


@dataclass
class SpaceFunction:
    """A function into a metric space, presented through oracles.

    cone_diameter(t) upper-bounds the diameter of the image of the cone at
    t and must be monotone along prefixes; sample(t) returns a point of the
    cone at t suitable for probing values.
    """

    name: str
    evaluate: Callable[[Point], Value]
    value_distance: Callable[[Value, Value], Dyadic]
    cone_diameter: Callable[[Seq], Dyadic] | None = None
    sample: Callable[[Seq], Point] | None = None
    spec: dict | None = None

    def __post_init__(self):
        if self.spec is None:
            self.spec = {"name": self.name}

    def sample_point(self, t: Seq) -> Point:
        if self.sample is not None:
            return self.sample(t)
        return PeriodicPoint(t, (0,))


def compose_function(phi: SpaceFunction, table: dict[Seq, Seq]) -> SpaceFunction:
    """phi after the continuous extension of the table embedding."""
    pi = MeetEmbedding.from_table(table)
    return SpaceFunction(
        name=f"{phi.name}∘table",
        evaluate=lambda p: phi.evaluate(extend(pi, p)),
        value_distance=phi.value_distance,
        cone_diameter=(None if phi.cone_diameter is None
                       else lambda t: phi.cone_diameter(pi.apply(t))),
        # Samples stay in the composed domain (evaluate applies the
        # embedding); this keeps every traced point finitely presented.
        sample=lambda t: PeriodicPoint(t, (0,)),
        spec={"base": phi.spec, "precompose": table_to_json(table)},
    )


# --- result modes ---------------------------------------------------------


@dataclass(frozen=True)
class InT:
    pass


@dataclass(frozen=True)
class InComplement:
    pass


@dataclass(frozen=True)
class Convergent:
    pass


@dataclass(frozen=True)
class Discrete:
    eps: Dyadic


@dataclass(frozen=True)
class DiscreteInjection:
    eps: Dyadic


@dataclass(frozen=True)
class InsideBall:
    center: Value


@dataclass(frozen=True)
class DiameterToZero:
    pass


@dataclass(frozen=True)
class SeparatedClosure:
    s: Seq
    delta: Dyadic


@dataclass(frozen=True)
class ContinuousAtBaire:
    pass


@dataclass(frozen=True)
class ConvergesToMember:
    x: Value


@dataclass(frozen=True)
class ClosureAvoidsF:
    eps: Dyadic
    u: Seq


@dataclass(frozen=True)
class GlobalConvergence:
    pass


@dataclass(frozen=True)
class PairwiseAvoidance:
    pass


@dataclass(frozen=True)
class Constant:
    pass


@dataclass(frozen=True)
class EmbedsIntoBaire:
    pass


@dataclass(frozen=True)
class EmbedsIntoBaireStar:
    pass


@dataclass
class PartialEmbedding:
    """A finite realization of a constructed embedding: the full table on
    its (depth, branch) range plus the trace that certifies it."""

    table: dict[Seq, Seq]
    depth: int
    branch: int
    trace: dict

    def embedding(self) -> MeetEmbedding:
        return MeetEmbedding.from_table(self.table)

    def __post_init__(self):
        v = validate(lambda t: self.table[t], self.depth, self.branch)
        if not isinstance(v, Valid):
            raise AssertionError(f"constructed table fails validation: {v}")


# --- search plumbing ------------------------------------------------------


class _Steps:
    def __init__(self, total: int, stage: str):
        self.left = total
        self.stage = stage

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded(f"step budget exhausted in {self.stage}", stage=self.stage)


class _SearchFailed(Exception):
    """A single bounded node search came up empty (not a hard budget stop)."""


_LOCAL_CAP = 600  # candidates examined per single node search


def _word_pool(branch: int) -> list[Seq]:
    """Candidate extension words in canonical order (weight, length, lex).

    All short words over a small alphabet, plus deep all-zero padding words
    so that length-sensitive searches can keep extending.
    """
    b = min(max(branch, 4), 6)
    words = set(nodes_in_range(4, b))
    words.update((0,) * k for k in range(5, 20))
    from .sequences import weight

    return sorted(words, key=lambda w: (weight(w), len(w), w))


def _find(pred: Callable[[Seq], bool], candidates, steps: _Steps) -> Seq:
    for n, c in enumerate(candidates):
        if n >= _LOCAL_CAP:
            break
        steps.tick()
        if pred(c):
            return c
    raise _SearchFailed


def _build_table(
    root_image: Seq,
    child_image: Callable[[Seq, int, Seq], Seq],
    out_depth: int,
    out_branch: int,
) -> dict[Seq, Seq]:
    table: dict[Seq, Seq] = {(): root_image}
    for t in nodes_in_range(out_depth, out_branch):
        if t:
            table[t] = child_image(t[:-1], t[-1], table[t[:-1]])
    return table


def _std_trace(op: str, params: dict, table: dict[Seq, Seq], certs: list[dict], **extra) -> dict:
    doc = {"op": op, "params": params, "table": table_to_json(table),
           "certificates": [{"kind": "valid_table"}] + certs}
    doc.update(extra)
    return doc


# --- operations -----------------------------------------------------------


def ramsey_split(
    T: TreeSetOracle,
    out_depth: int,
    out_branch: int,
    budget: DepthBudget | None = None,
) -> tuple[InT | InComplement, PartialEmbedding]:
    """Build a full table landing entirely inside T or entirely outside it.

    Both sides are attempted, T first; within a side, candidate roots are
    tried in canonical order, each with per-node word searches.
    """
    budget = budget or DEFAULT_BUDGET
    pool = _word_pool(out_branch)
    roots = nodes_in_range(3, max(out_branch, 3))

    def attempt(inside: bool) -> dict[Seq, Seq]:
        steps = _Steps(budget.steps, "ramsey_split")
        member = T.member if inside else (lambda t: not T.member(t))
        for s in roots:
            try:
                root = _find(member, (s + w for w in pool), steps)
                return _build_table(
                    root,
                    lambda t, i, pimg: _find(member, (pimg + (i,) + w for w in pool), steps),
                    out_depth,
                    out_branch,
                )
            except _SearchFailed:
                continue
        raise BudgetExceeded("no root admits a full table on this side", stage="ramsey_split")

    try:
        table, side, inside = attempt(True), InT(), True
    except BudgetExceeded:
        table, side, inside = attempt(False), InComplement(), False

    certs = [{"kind": "in_set", "oracle": T.name, "node": list(img), "member": inside}
             for img in table.values()]
    trace = _std_trace("ramsey_split", {"depth": out_depth, "branch": out_branch},
                       table, certs, oracle=T.name,
                       side="InT" if inside else "InComplement")
    return side, PartialEmbedding(table, out_depth, out_branch, trace)


def _pick_in_set(oracle: TreeSetOracle, r: Seq, pool: list[Seq], steps: _Steps) -> Seq:
    if oracle.dense_extension is not None:
        t = tuple(oracle.dense_extension(r))
        if is_prefix(r, t) and oracle.member(t):
            steps.tick()
            return t
    return _find(oracle.member, (r + w for w in pool), steps)


def category_refine(
    families: Sequence[TreeSetOracle] | Callable[[int], TreeSetOracle],
    s: Seq,
    out_depth: int,
    out_branch: int,
    budget: DepthBudget | None = None,
    op_name: str = "category_refine",
) -> PartialEmbedding:
    """Table rooted in the cone at s with every length-n image in T_n."""
    budget = budget or DEFAULT_BUDGET
    level = families.__getitem__ if isinstance(families, Sequence) else families
    steps = _Steps(budget.steps, op_name)
    pool = _word_pool(out_branch)
    try:
        root = _pick_in_set(level(0), tuple(s), pool, steps)
        table = _build_table(
            root,
            lambda t, i, pimg: _pick_in_set(level(len(t) + 1), pimg + (i,), pool, steps),
            out_depth,
            out_branch,
        )
    except _SearchFailed:
        raise BudgetExceeded("level constraint not reachable by search", stage=op_name)
    certs = [{"kind": "in_set", "family_level": len(t), "node": list(img), "member": True}
             for t, img in table.items()]
    family_name = getattr(families, "family_name", None) or getattr(level(0), "name", "?")
    trace = _std_trace(op_name, {"depth": out_depth, "branch": out_branch, "root": list(s)},
                       table, certs, family=family_name)
    return PartialEmbedding(table, out_depth, out_branch, trace)


def continuity_refine(
    families: Sequence[TreeSetOracle] | Callable[[int], TreeSetOracle],
    s: Seq = (),
    out_depth: int = 3,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> PartialEmbedding:
    """Refine along a dense-open presentation of a continuity set.

    The presentation is the same data category_refine consumes, and the
    work is delegated wholesale.
    """
    return category_refine(families, s, out_depth, out_branch, budget,
                           op_name="continuity_refine")


def diameter_shrink(
    phi: SpaceFunction,
    schedule: EpsilonSchedule | None = None,
    out_depth: int = 3,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> PartialEmbedding:
    """Table with cone_diameter(image of t) < epsilon_t for every node."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    if phi.cone_diameter is None:
        raise DomainMismatch("diameter_shrink needs a cone_diameter oracle")
    steps = _Steps(budget.steps, "diameter_shrink")
    pool = _word_pool(out_branch)
    try:
        root = _find(lambda c: phi.cone_diameter(c) < schedule(()),
                     (w for w in pool), steps)
        table = _build_table(
            root,
            lambda t, i, pimg: _find(
                lambda c, _n=t + (i,): phi.cone_diameter(c) < schedule(_n),
                (pimg + (i,) + w for w in pool), steps),
            out_depth,
            out_branch,
        )
    except _SearchFailed:
        raise BudgetExceeded("no image with small enough cone diameter", stage="diameter_shrink")
    certs = [{"kind": "diam_lt", "node": list(img), "eps": str(schedule(t))}
             for t, img in table.items()]
    trace = _std_trace("diameter_shrink",
                       {"depth": out_depth, "branch": out_branch, "schedule": schedule.name},
                       table, certs, function=phi.spec)
    return PartialEmbedding(table, out_depth, out_branch, trace)


def children_stabilize(
    phi: SpaceFunction,
    selector_budget: int = 48,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[PartialEmbedding, dict[Seq, Convergent | Discrete]]:
    """Re-index children so the values at each node's augmented children
    form a certified convergent chain or a certified discrete family.

    Convergence is tested against the deepest probed child as candidate
    limit, with tolerances halving per step starting from 1; discreteness
    by the largest power-of-two separation a greedy pick sustains.
    """
    budget = budget or DEFAULT_BUDGET
    chain_len = max(out_branch, 8)
    if chain_len > selector_budget:
        raise BudgetExceeded("selector budget below required chain length",
                             stage="children_stabilize")
    verdicts: dict[Seq, Convergent | Discrete] = {}
    certs: list[dict] = []

    def stabilize(node: Seq, r: Seq) -> list[int]:
        values = [phi.evaluate(AugmentedPoint(r + (k,))) for k in range(selector_budget)]
        tail = selector_budget - 1
        limit = values[tail]
        picks: list[int] = []
        k = 0
        while len(picks) < chain_len and k < tail:
            if phi.value_distance(values[k], limit) <= Dyadic.pow2(-len(picks)):
                picks.append(k)
            k += 1
        if len(picks) == chain_len:
            verdicts[node] = Convergent()
            for i, kk in enumerate(picks[:out_branch]):
                certs.append({"kind": "value_dist_le",
                              "a": point_to_json(AugmentedPoint(r + (kk,))),
                              "b": point_to_json(AugmentedPoint(r + (tail,))),
                              "bound": str(Dyadic.pow2(-i))})
            return picks[:out_branch]
        for e in range(13):
            eps = Dyadic.pow2(-e)
            picks = []
            for k in range(selector_budget):
                if all(phi.value_distance(values[k], values[p]) >= eps for p in picks):
                    picks.append(k)
                if len(picks) == out_branch:
                    break
            if len(picks) == out_branch:
                verdicts[node] = Discrete(eps)
                for a in range(out_branch):
                    for b in range(a + 1, out_branch):
                        certs.append({"kind": "value_dist_ge",
                                      "a": point_to_json(AugmentedPoint(r + (picks[a],))),
                                      "b": point_to_json(AugmentedPoint(r + (picks[b],))),
                                      "bound": str(eps)})
                return picks
        raise BudgetExceeded(f"neither verdict certified at {node}",
                             stage="children_stabilize")

    selectors: dict[Seq, list[int]] = {}

    def child_image(t: Seq, i: int, pimg: Seq) -> Seq:
        if t not in selectors:
            selectors[t] = stabilize(t, pimg)
        return pimg + (selectors[t][i],)

    table = _build_table((), child_image, out_depth, out_branch)
    trace = _std_trace("children_stabilize",
                       {"depth": out_depth, "branch": out_branch,
                        "selector_budget": selector_budget},
                       table, certs, function=phi.spec,
                       verdicts={node_key(t): ("Convergent" if isinstance(v, Convergent)
                                               else f"Discrete:{v.eps}")
                                 for t, v in sorted(verdicts.items())})
    return PartialEmbedding(table, out_depth, out_branch, trace), verdicts


def disjointify(
    phi: SpaceFunction,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> PartialEmbedding:
    """Table whose sibling child cones carry values certified apart:
    dist(sample_i, sample_j) > diam_i + diam_j for all sibling pairs."""
    budget = budget or DEFAULT_BUDGET
    if phi.cone_diameter is None:
        raise DomainMismatch("disjointify needs a cone_diameter oracle")
    certs: list[dict] = []

    def children(t: Seq, r: Seq) -> list[Seq]:
        samples = [phi.sample_point(r + (i,)) for i in range(out_branch)]
        values = [phi.evaluate(p) for p in samples]
        for a in range(out_branch):
            for b in range(a + 1, out_branch):
                if phi.value_distance(values[a], values[b]).is_zero():
                    raise BudgetExceeded(
                        f"samples below {r} do not separate (constant region?)",
                        stage="disjointify")
        for m in range(24):
            imgs = []
            for i, p in enumerate(samples):
                depth_i = len(r) + 1 + m
                pre = p.restrict(depth_i, budget)
                if pre.marked or len(pre.seq) < depth_i:
                    raise BudgetExceeded("sample too short to deepen its cone",
                                         stage="disjointify")
                imgs.append(pre.seq)
            ok = all(
                phi.value_distance(values[a], values[b])
                > phi.cone_diameter(imgs[a]) + phi.cone_diameter(imgs[b])
                for a in range(out_branch) for b in range(a + 1, out_branch)
            )
            if ok:
                for a in range(out_branch):
                    for b in range(a + 1, out_branch):
                        certs.append({"kind": "dist_gt_sum",
                                      "a": point_to_json(samples[a]),
                                      "b": point_to_json(samples[b]),
                                      "na": list(imgs[a]), "nb": list(imgs[b])})
                return imgs
        raise BudgetExceeded(f"separation never dominates diameters below {r}",
                             stage="disjointify")

    chosen: dict[Seq, list[Seq]] = {}

    def child_image(t: Seq, i: int, pimg: Seq) -> Seq:
        if t not in chosen:
            chosen[t] = children(t, pimg)
        return chosen[t][i]

    table = _build_table((), child_image, out_depth, out_branch)
    trace = _std_trace("disjointify", {"depth": out_depth, "branch": out_branch},
                       table, certs, function=phi.spec)
    return PartialEmbedding(table, out_depth, out_branch, trace)


def limit_refine(
    phi: SpaceFunction,
    schedule: EpsilonSchedule | None = None,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[SeparatedClosure | ContinuousAtBaire, PartialEmbedding]:
    """Certify continuity at infinite points, or fall back to a uniform
    separation between infinite-part and augmented-part values."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    steps = _Steps(budget.steps, "limit_refine")
    pool = _word_pool(out_branch)
    certs: list[dict] = []

    def near(img: Seq, node: Seq) -> bool:
        b = phi.sample_point(img)
        d = phi.value_distance(phi.evaluate(b), phi.evaluate(AugmentedPoint(img)))
        return d < schedule(node)

    def record(img: Seq, node: Seq) -> None:
        certs.append({"kind": "value_dist_lt",
                      "a": point_to_json(phi.sample_point(img)),
                      "b": point_to_json(AugmentedPoint(img)),
                      "bound": str(schedule(node))})

    try:
        root = _find(lambda c: near(c, ()), (w for w in pool), steps)
        table = _build_table(
            root,
            lambda t, i, pimg: _find(lambda c, _n=t + (i,): near(c, _n),
                                     (pimg + (i,) + w for w in pool), steps),
            out_depth, out_branch)
        for t, img in table.items():
            record(img, t)
        trace = _std_trace("limit_refine",
                           {"depth": out_depth, "branch": out_branch,
                            "schedule": schedule.name},
                           table, certs, function=phi.spec, mode="ContinuousAtBaire")
        return ContinuousAtBaire(), PartialEmbedding(table, out_depth, out_branch, trace)
    except (_SearchFailed, BudgetExceeded):
        pass

    aug_words = [w for w in pool if len(w) <= 2][:12]
    for s in nodes_in_range(2, max(out_branch, 3)):
        steps.tick()
        baire = [phi.sample_point(s + w) for w in aug_words[:6]]
        augs = [AugmentedPoint(s + w) for w in aug_words]
        delta = None
        for b in baire:
            vb = phi.evaluate(b)
            for a in augs:
                d = phi.value_distance(vb, phi.evaluate(a))
                delta = d if delta is None or d < delta else delta
        if delta is not None and not delta.is_zero():
            pi = MeetEmbedding.prefix(s)
            table = {t: pi.apply(t) for t in nodes_in_range(out_depth, out_branch)}
            for b in baire:
                for a in augs:
                    certs.append({"kind": "value_dist_ge",
                                  "a": point_to_json(b), "b": point_to_json(a),
                                  "bound": str(delta)})
            trace = _std_trace("limit_refine",
                               {"depth": out_depth, "branch": out_branch,
                                "schedule": schedule.name},
                               table, certs, function=phi.spec,
                               mode="SeparatedClosure", s=list(s), delta=str(delta))
            return SeparatedClosure(s, delta), PartialEmbedding(table, out_depth, out_branch, trace)
    raise BudgetExceeded("neither continuity nor separation certified", stage="limit_refine")


def epsilon_discrete_or_ball(
    phi: SpaceFunction,
    eps: Dyadic,
    t: Seq = (),
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[DiscreteInjection | InsideBall, PartialEmbedding]:
    """Inject the range into an eps-discrete value set, or certify all
    values inside the eps-ball around one attained value.

    The discrete branch walks nodes in canonical enumeration order; the
    image of the n-th node extends its parent's image by the child
    coordinate n, so sibling divergence is automatic.
    """
    budget = budget or DEFAULT_BUDGET
    t = tuple(t)
    steps = _Steps(budget.steps, "epsilon_discrete_or_ball")
    pool = _word_pool(out_branch)
    ordered = nodes_in_range(out_depth, out_branch)

    try:
        table: dict[Seq, Seq] = {}
        chosen_values: dict[Seq, Value] = {}

        def fresh(c: Seq) -> bool:
            v = phi.evaluate(AugmentedPoint(c))
            return all(phi.value_distance(v, old) >= eps for old in chosen_values.values())

        for n, u in enumerate(ordered):
            if not u:
                img = _find(fresh, (t + w for w in pool), steps)
            else:
                pimg = table[u[:-1]]
                img = _find(fresh, (pimg + (n,) + w for w in pool), steps)
            table[u] = img
            chosen_values[u] = phi.evaluate(AugmentedPoint(img))
        certs = []
        nodes = list(table)
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                certs.append({"kind": "value_dist_ge",
                              "a": point_to_json(AugmentedPoint(table[nodes[a]])),
                              "b": point_to_json(AugmentedPoint(table[nodes[b]])),
                              "bound": str(eps)})
        trace = _std_trace("epsilon_discrete_or_ball",
                           {"depth": out_depth, "branch": out_branch,
                            "eps": str(eps), "root": list(t)},
                           table, certs, function=phi.spec, mode="DiscreteInjection")
        return DiscreteInjection(eps), PartialEmbedding(table, out_depth, out_branch, trace)
    except (_SearchFailed, BudgetExceeded):
        pass

    steps = _Steps(budget.steps, "epsilon_discrete_or_ball")
    for u in pool[:16]:
        center_point = AugmentedPoint(t + u)
        center = phi.evaluate(center_point)

        def inside(c: Seq) -> bool:
            return phi.value_distance(phi.evaluate(AugmentedPoint(c)), center) < eps

        try:
            root = _find(inside, (t + w for w in pool), steps)
            table = _build_table(
                root,
                lambda tt, i, pimg: _find(inside, (pimg + (i,) + w for w in pool), steps),
                out_depth, out_branch)
        except _SearchFailed:
            continue
        certs = [{"kind": "value_dist_lt",
                  "a": point_to_json(AugmentedPoint(img)),
                  "b": point_to_json(center_point),
                  "bound": str(eps)}
                 for img in table.values()]
        trace = _std_trace("epsilon_discrete_or_ball",
                           {"depth": out_depth, "branch": out_branch,
                            "eps": str(eps), "root": list(t)},
                           table, certs, function=phi.spec,
                           mode="InsideBall", center=value_to_json(center))
        return InsideBall(center), PartialEmbedding(table, out_depth, out_branch, trace)
    raise BudgetExceeded("neither discrete injection nor ball certified",
                         stage="epsilon_discrete_or_ball")


def shrink_or_discrete(
    phi: SpaceFunction,
    schedule: EpsilonSchedule | None = None,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[DiscreteInjection | DiameterToZero, PartialEmbedding]:
    """Discrete injection at unit scale, or a table whose per-cone value
    sets have diameter below the schedule, certified pairwise."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    try:
        mode, pe = epsilon_discrete_or_ball(phi, Dyadic.one(), (), out_depth, out_branch, budget)
        if isinstance(mode, DiscreteInjection):
            pe.trace["op"] = "shrink_or_discrete"
            pe.trace["mode"] = "DiscreteInjection"
            return mode, pe
    except BudgetExceeded:
        pass

    steps = _Steps(budget.steps, "shrink_or_discrete")
    pool = _word_pool(out_branch)
    tail_k = 16

    def limit_at(r: Seq) -> Value:
        return phi.evaluate(AugmentedPoint(r + (tail_k,)))

    try:
        root = _find(
            lambda c: phi.value_distance(phi.evaluate(AugmentedPoint(c)), limit_at(c))
            < schedule(()).half(),
            (w for w in pool), steps)
        limit = limit_at(root)

        def ok(c: Seq, node: Seq) -> bool:
            return phi.value_distance(phi.evaluate(AugmentedPoint(c)), limit) \
                < schedule(node).half()

        table = _build_table(
            root,
            lambda t, i, pimg: _find(lambda c, _n=t + (i,): ok(c, _n),
                                     (pimg + (i,) + w for w in pool), steps),
            out_depth, out_branch)
    except _SearchFailed:
        raise BudgetExceeded("diameter-to-zero table not reachable", stage="shrink_or_discrete")

    certs = []
    for t in table:
        members = [table[u] for u in table if is_prefix(t, u)]
        eps_t = schedule(t)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                d = phi.value_distance(phi.evaluate(AugmentedPoint(members[a])),
                                       phi.evaluate(AugmentedPoint(members[b])))
                if not d < eps_t:
                    raise BudgetExceeded(f"cone value diameter not below {eps_t} at {t}",
                                         stage="shrink_or_discrete")
        certs.append({"kind": "cone_value_diam_lt",
                      "members": [list(m) for m in members], "eps": str(eps_t)})
    certs.append({"kind": "meet_table"})
    trace = _std_trace("shrink_or_discrete",
                       {"depth": out_depth, "branch": out_branch, "schedule": schedule.name},
                       table, certs, function=phi.spec, mode="DiameterToZero")
    return DiameterToZero(), PartialEmbedding(table, out_depth, out_branch, trace)


def point_avoid(
    phi: SpaceFunction,
    x: Value,
    budget: DepthBudget | None = None,
) -> tuple[Seq, PartialEmbedding]:
    """A node below which every sampled augmented value differs from x."""
    budget = budget or DEFAULT_BUDGET
    steps = _Steps(budget.steps, "point_avoid")
    words = nodes_in_range(2, 4)
    for s in nodes_in_range(3, 4):
        steps.tick()
        dists = [phi.value_distance(phi.evaluate(AugmentedPoint(s + u)), x) for u in words]
        if all(not d.is_zero() for d in dists):
            certs = [{"kind": "avoid_value",
                      "a": point_to_json(AugmentedPoint(s + u)),
                      "x": value_to_json(x), "bound": str(d)}
                     for u, d in zip(words, dists)]
            pi = MeetEmbedding.prefix(s)
            table = {t: pi.apply(t) for t in nodes_in_range(2, 3)}
            trace = _std_trace("point_avoid", {"x": value_to_json(x)}, table, certs,
                               function=phi.spec, s=list(s))
            return s, PartialEmbedding(table, 2, 3, trace)
    raise BudgetExceeded("no avoiding node certified within budget", stage="point_avoid")


def finite_avoid_or_converge(
    phi: SpaceFunction,
    F: Sequence[Value],
    t: Seq = (),
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[ConvergesToMember | ClosureAvoidsF, PartialEmbedding]:
    """Converge to a member of the finite value set F, or certify a uniform
    positive separation from all of F below some extension of t."""
    budget = budget or DEFAULT_BUDGET
    schedule = weight_schedule()
    t = tuple(t)
    pool = _word_pool(out_branch)

    for x in F:
        steps = _Steps(budget.steps, "finite_avoid_or_converge")

        def near(c: Seq, node: Seq) -> bool:
            return phi.value_distance(phi.evaluate(AugmentedPoint(c)), x) < schedule(node)

        try:
            root = _find(lambda c: near(c, ()), (t + w for w in pool), steps)
            table = _build_table(
                root,
                lambda tt, i, pimg: _find(lambda c, _n=tt + (i,): near(c, _n),
                                          (pimg + (i,) + w for w in pool), steps),
                out_depth, out_branch)
        except (_SearchFailed, BudgetExceeded):
            continue
        certs = [{"kind": "avoid_value", "op": "lt",
                  "a": point_to_json(AugmentedPoint(img)),
                  "x": value_to_json(x), "bound": str(schedule(u))}
                 for u, img in table.items()]
        trace = _std_trace("finite_avoid_or_converge",
                           {"depth": out_depth, "branch": out_branch, "root": list(t)},
                           table, certs, function=phi.spec,
                           mode="ConvergesToMember", x=value_to_json(x))
        return ConvergesToMember(x), PartialEmbedding(table, out_depth, out_branch, trace)

    steps = _Steps(budget.steps, "finite_avoid_or_converge")
    words = [w for w in pool if len(w) <= 2][:12]
    for u0 in pool[:24]:
        steps.tick()
        u = t + u0
        delta = None
        for w in words:
            v = phi.evaluate(AugmentedPoint(u + w))
            for x in F:
                d = phi.value_distance(v, x)
                delta = d if delta is None or d < delta else delta
        if delta is not None and not delta.is_zero():
            pi = MeetEmbedding.prefix(u)
            table = {v: pi.apply(v) for v in nodes_in_range(out_depth, out_branch)}
            certs = [{"kind": "avoid_value",
                      "a": point_to_json(AugmentedPoint(u + w)),
                      "x": value_to_json(x), "bound": str(delta)}
                     for w in words for x in F]
            trace = _std_trace("finite_avoid_or_converge",
                               {"depth": out_depth, "branch": out_branch, "root": list(t)},
                               table, certs, function=phi.spec,
                               mode="ClosureAvoidsF", eps=str(delta), u=list(u))
            return ClosureAvoidsF(delta, u), PartialEmbedding(table, out_depth, out_branch, trace)
    raise BudgetExceeded("neither convergence nor avoidance certified",
                         stage="finite_avoid_or_converge")


def discrete_refine(
    phi: SpaceFunction,
    schedule: EpsilonSchedule | None = None,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[GlobalConvergence | PairwiseAvoidance, PartialEmbedding]:
    """All values converge to one limit, or earlier nodes' augmented values
    stay positively separated from everything sampled below later nodes."""
    schedule = schedule or weight_schedule()
    budget = budget or DEFAULT_BUDGET
    pool = _word_pool(out_branch)
    steps = _Steps(budget.steps, "discrete_refine")
    tail_k = 16

    try:
        root = _find(
            lambda c: phi.value_distance(
                phi.evaluate(AugmentedPoint(c)),
                phi.evaluate(AugmentedPoint(c + (tail_k,)))) < schedule(()).half(),
            (w for w in pool), steps)
        tail_point = AugmentedPoint(root + (tail_k,))
        limit = phi.evaluate(tail_point)

        def near(c: Seq, node: Seq) -> bool:
            return phi.value_distance(phi.evaluate(AugmentedPoint(c)), limit) \
                < schedule(node).half()

        table = _build_table(
            root,
            lambda t, i, pimg: _find(lambda c, _n=t + (i,): near(c, _n),
                                     (pimg + (i,) + w for w in pool), steps),
            out_depth, out_branch)
        certs = [{"kind": "value_dist_lt",
                  "a": point_to_json(AugmentedPoint(img)),
                  "b": point_to_json(tail_point),
                  "bound": str(schedule(u).half())}
                 for u, img in table.items()]
        certs.append({"kind": "meet_table"})
        trace = _std_trace("discrete_refine",
                           {"depth": out_depth, "branch": out_branch, "schedule": schedule.name},
                           table, certs, function=phi.spec, mode="GlobalConvergence")
        return GlobalConvergence(), PartialEmbedding(table, out_depth, out_branch, trace)
    except (_SearchFailed, BudgetExceeded):
        pass

    steps = _Steps(budget.steps, "discrete_refine")
    below_words = [w for w in pool if len(w) <= 1][:4]
    ordered = nodes_in_range(out_depth, out_branch)
    table = {}
    limits: dict[Seq, Value] = {}
    certs = []

    def avoiding(c: Seq) -> Dyadic | None:
        worst = None
        for w in below_words:
            v = phi.evaluate(AugmentedPoint(c + w))
            for x in limits.values():
                d = phi.value_distance(x, v)
                if d.is_zero():
                    return None
                worst = d if worst is None or d < worst else worst
        return worst if worst is not None else Dyadic.one()

    try:
        for u in ordered:
            cands = (w for w in pool) if not u else \
                (table[u[:-1]] + (u[-1],) + w for w in pool)
            img = _find(lambda c: avoiding(c) is not None, cands, steps)
            bound = avoiding(img)
            for w in below_words:
                for m, x in limits.items():
                    certs.append({"kind": "avoid_pair",
                                  "a": point_to_json(AugmentedPoint(table[m])),
                                  "b": point_to_json(AugmentedPoint(img + w)),
                                  "bound": str(bound)})
            table[u] = img
            limits[u] = phi.evaluate(AugmentedPoint(img))
    except _SearchFailed:
        raise BudgetExceeded("pairwise avoidance not certified", stage="discrete_refine")
    certs.append({"kind": "meet_table"})
    trace = _std_trace("discrete_refine",
                       {"depth": out_depth, "branch": out_branch, "schedule": schedule.name},
                       table, certs, function=phi.spec, mode="PairwiseAvoidance")
    return PairwiseAvoidance(), PartialEmbedding(table, out_depth, out_branch, trace)


def disjoint_refine(
    phi: SpaceFunction,
    witness: Point,
    delta: Dyadic,
    budget: DepthBudget | None = None,
) -> PartialEmbedding:
    """Prefix embedding at an initial segment of the witness whose cone has
    image diameter below delta/3, separating the infinite-part values from
    the augmented-part samples."""
    budget = budget or DEFAULT_BUDGET
    if phi.cone_diameter is None:
        raise DomainMismatch("disjoint_refine needs a cone_diameter oracle")
    third = Dyadic(delta.num, delta.exp + 2)  # delta/4 <= delta/3, still positive
    wb = phi.evaluate(witness)
    aug_words = nodes_in_range(2, 3)
    for u in aug_words:
        d = phi.value_distance(wb, phi.evaluate(AugmentedPoint(u)))
        if d < delta:
            raise BudgetExceeded(
                f"witness separation fails: augmented sample at {u} is at distance {d} < {delta}",
                stage="disjoint_refine")
    s = None
    for i in range(budget.depth + 1):
        pre = witness.restrict(i, budget)
        if pre.marked:
            break
        if phi.cone_diameter(pre.seq) < third:
            s = pre.seq
            break
    if s is None:
        raise BudgetExceeded("no witness prefix with small enough image diameter",
                             stage="disjoint_refine")
    certs = [{"kind": "diam_lt", "node": list(s), "eps": str(third)}]
    sample = phi.sample_point(s)
    certs.append({"kind": "value_dist_le",
                  "a": point_to_json(sample), "b": point_to_json(witness),
                  "bound": str(third)})
    for u in aug_words:
        certs.append({"kind": "value_dist_ge",
                      "a": point_to_json(witness),
                      "b": point_to_json(AugmentedPoint(u)),
                      "bound": str(delta)})
    pi = MeetEmbedding.prefix(s)
    table = {t: pi.apply(t) for t in nodes_in_range(2, 3)}
    trace = _std_trace("disjoint_refine",
                       {"delta": str(delta)}, table, certs,
                       function=phi.spec, witness=point_to_json(witness), s=list(s))
    return PartialEmbedding(table, 2, 3, trace)


def classify_baire_function(
    phi: SpaceFunction,
    out_depth: int = 2,
    out_branch: int = 3,
    budget: DepthBudget | None = None,
) -> tuple[Constant | EmbedsIntoBaire | EmbedsIntoBaireStar, PartialEmbedding, list[dict]]:
    """Trichotomy pipeline: constant-region probe, then diameter shrinking,
    child stabilization (uniform verdict required), and disjointification,
    with the composite table and all stage traces as evidence."""
    budget = budget or DEFAULT_BUDGET
    probes = [phi.sample_point(t) for t in nodes_in_range(2, 3)[:9]]
    values = [phi.evaluate(p) for p in probes]
    if all(phi.value_distance(values[0], v).is_zero() for v in values[1:]):
        certs = [{"kind": "value_dist_le", "a": point_to_json(probes[0]),
                  "b": point_to_json(p), "bound": "0"} for p in probes[1:]]
        pi = MeetEmbedding.identity()
        table = {t: t for t in nodes_in_range(out_depth, out_branch)}
        trace = _std_trace("classify_baire_function",
                           {"depth": out_depth, "branch": out_branch},
                           table, certs, function=phi.spec, shape="Constant", stages=[])
        return Constant(), PartialEmbedding(table, out_depth, out_branch, trace), [trace]

    st1 = diameter_shrink(phi, None, out_depth, out_branch, budget)
    phi1 = compose_function(phi, st1.table)
    st2, verdicts = children_stabilize(phi1, 48, out_depth, out_branch, budget)
    kinds = {type(v) for v in verdicts.values()}
    if kinds == {Convergent}:
        shape = EmbedsIntoBaireStar()
    elif kinds == {Discrete}:
        shape = EmbedsIntoBaire()
    else:
        raise BudgetExceeded("mixed child verdicts; no uniform shape certified",
                             stage="classify_baire_function")
    phi2 = compose_function(phi1, st2.table)
    st3 = disjointify(phi2, out_depth, out_branch, budget)

    pi1 = MeetEmbedding.from_table(st1.table)
    pi2 = MeetEmbedding.from_table(st2.table)
    pi3 = MeetEmbedding.from_table(st3.table)
    table = {t: pi1.apply(pi2.apply(pi3.apply(t)))
             for t in nodes_in_range(out_depth, out_branch)}
    shape_name = type(shape).__name__
    evidence = [st1.trace, st2.trace, st3.trace]
    trace = _std_trace("classify_baire_function",
                       {"depth": out_depth, "branch": out_branch},
                       table, [{"kind": "meet_table"}],
                       function=phi.spec, shape=shape_name, stages=evidence)
    return shape, PartialEmbedding(table, out_depth, out_branch, trace), evidence
