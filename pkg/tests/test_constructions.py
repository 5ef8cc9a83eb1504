import copy
import json

import pytest

from seqstar.constructions import (
    ClosureAvoidsF,
    Constant,
    ContinuousAtBaire,
    Convergent,
    ConvergesToMember,
    DiameterToZero,
    Discrete,
    DiscreteInjection,
    EmbedsIntoBaire,
    EmbedsIntoBaireStar,
    GlobalConvergence,
    InComplement,
    InT,
    InsideBall,
    PairwiseAvoidance,
    SeparatedClosure,
    classify_baire_function,
    category_refine,
    children_stabilize,
    diameter_shrink,
    discrete_refine,
    disjoint_refine,
    disjointify,
    epsilon_discrete_or_ball,
    finite_avoid_or_converge,
    limit_refine,
    point_avoid,
    ramsey_split,
    shrink_or_discrete,
)
from seqstar.embeddings import Valid, validate
from seqstar.metric import Dyadic, weight_schedule
from seqstar.registry import space_function, tree_family, tree_set
from seqstar.sequences import BudgetExceeded, DepthBudget, PeriodicPoint
from seqstar.trace import recheck

BUDGET = DepthBudget(depth=48, branch=32, steps=2_000_000)
SCHED = weight_schedule()


def assert_good(pe):
    assert isinstance(validate(pe.embedding().apply, pe.depth, pe.branch), Valid)
    report = recheck(pe.trace)
    assert report.ok, report.failures
    return report


def test_ramsey_even_sum_lands_in_t():
    oracle = tree_set("even-sum")
    side, pe = ramsey_split(oracle, 3, 3, BUDGET)
    assert isinstance(side, InT)
    for t, img in pe.table.items():
        assert sum(img) % 2 == 0
    assert_good(pe)


def test_ramsey_all_nodes_is_in_t():
    side, pe = ramsey_split(tree_set("all"), 2, 2, BUDGET)
    assert isinstance(side, InT)
    assert_good(pe)


def test_ramsey_short_forces_complement():
    side, pe = ramsey_split(tree_set("short"), 3, 3, BUDGET)
    assert isinstance(side, InComplement)
    assert_good(pe)


def test_category_length_levels():
    pe = category_refine(tree_family("length-at-least"), (), 3, 3, BUDGET)
    for t, img in pe.table.items():
        assert len(img) >= len(t)
    assert_good(pe)


def test_category_ends_in_zero_levels():
    fam = tree_family("ends-in-zero-level")
    pe = category_refine(fam, (), 3, 3, BUDGET)
    for t, img in pe.table.items():
        oracle = fam(len(t))
        assert oracle.member(img)
        if t:
            assert img[-1] == 0
    assert_good(pe)


def test_diameter_shrink_certificates():
    phi = space_function("prefix-embed")
    pe = diameter_shrink(phi, SCHED, 3, 3, BUDGET)
    for t, img in pe.table.items():
        assert phi.cone_diameter(img) < SCHED(t)
    assert_good(pe)


def test_diameter_shrink_constant_is_easy():
    pe = diameter_shrink(space_function("const-zero"), SCHED, 2, 2, BUDGET)
    assert_good(pe)


def test_diameter_shrink_half_eps():
    pe = diameter_shrink(space_function("half-eps-diam"), SCHED, 2, 2, BUDGET)
    assert_good(pe)


def test_stabilize_verdicts():
    _, verdicts = children_stabilize(space_function("two-pow-last"), budget=BUDGET)
    assert all(isinstance(v, Convergent) for v in verdicts.values())
    _, verdicts = children_stabilize(space_function("last-entry"), budget=BUDGET)
    assert all(isinstance(v, Discrete) and v.eps == Dyadic(1, 0) for v in verdicts.values())
    _, verdicts = children_stabilize(space_function("const-zero"), budget=BUDGET)
    assert all(isinstance(v, Convergent) for v in verdicts.values())


def test_stabilize_trace_rechecks():
    pe, _ = children_stabilize(space_function("last-entry"), budget=BUDGET)
    assert_good(pe)


def test_disjointify_identity():
    pe = disjointify(space_function("compactify-identity"), 2, 3, BUDGET)
    assert_good(pe)


def test_disjointify_first_entry():
    # injective on depth-1 child cones; constant below them, so depth 1 only
    pe = disjointify(space_function("first-entry"), 1, 3, BUDGET)
    assert_good(pe)


def test_disjointify_constant_exceeds_budget():
    with pytest.raises(BudgetExceeded):
        disjointify(space_function("const-zero"), 2, 3, BUDGET)


def test_limit_refine_modes():
    mode, pe = limit_refine(space_function("zero-one-split"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, SeparatedClosure)
    assert mode.s == () and mode.delta == Dyadic(1, 0)
    assert_good(pe)
    mode, pe = limit_refine(space_function("depth-collapse"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, ContinuousAtBaire)
    assert_good(pe)
    mode, pe = limit_refine(space_function("const-zero"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, ContinuousAtBaire)
    assert_good(pe)


def test_eps_split_modes():
    mode, pe = epsilon_discrete_or_ball(space_function("entry-sum"), Dyadic(1, 0), (), 2, 3, BUDGET)
    assert isinstance(mode, DiscreteInjection)
    assert_good(pe)
    mode, pe = epsilon_discrete_or_ball(space_function("const-zero"), Dyadic(1, 1), (), 2, 3, BUDGET)
    assert isinstance(mode, InsideBall)
    assert mode.center == Dyadic.zero()
    assert_good(pe)
    mode, pe = epsilon_discrete_or_ball(space_function("two-pow-weight"), Dyadic(1, 0), (), 2, 3, BUDGET)
    assert isinstance(mode, InsideBall)
    assert_good(pe)


def test_shrink_or_discrete_modes():
    mode, pe = shrink_or_discrete(space_function("length"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, DiscreteInjection)
    assert mode.eps == Dyadic(1, 0)
    assert_good(pe)
    mode, pe = shrink_or_discrete(space_function("const-zero"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, DiameterToZero)
    assert_good(pe)
    mode, pe = shrink_or_discrete(space_function("two-pow-weight"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, DiameterToZero)
    assert_good(pe)


def test_point_avoid():
    s, pe = point_avoid(space_function("entry-sum"), Dyadic.zero(), BUDGET)
    assert sum(s) >= 1
    assert_good(pe)
    s, pe = point_avoid(space_function("entry-sum"), Dyadic(1, 1), BUDGET)
    assert s == ()  # one half is never an entry sum
    assert_good(pe)


def test_finite_avoid_or_converge():
    phi = space_function("two-pow-weight")
    mode, pe = finite_avoid_or_converge(phi, [Dyadic.zero(), Dyadic(1, 0)], (), 2, 3, BUDGET)
    assert isinstance(mode, ConvergesToMember)
    assert mode.x == Dyadic.zero()
    assert_good(pe)
    mode, pe = finite_avoid_or_converge(space_function("const-zero"), [Dyadic.zero()], (), 2, 3, BUDGET)
    assert isinstance(mode, ConvergesToMember)
    assert_good(pe)
    mode, pe = finite_avoid_or_converge(space_function("length"), [Dyadic(1, 1)], (), 2, 3, BUDGET)
    assert isinstance(mode, ClosureAvoidsF)
    assert_good(pe)


def test_discrete_refine_modes():
    mode, pe = discrete_refine(space_function("two-pow-weight"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, GlobalConvergence)
    assert_good(pe)
    mode, pe = discrete_refine(space_function("const-zero"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, GlobalConvergence)
    assert_good(pe)
    mode, pe = discrete_refine(space_function("enum-index"), SCHED, 2, 3, BUDGET)
    assert isinstance(mode, PairwiseAvoidance)
    assert_good(pe)


def test_disjoint_refine_good_and_bad_witness():
    phi = space_function("zero-one-split")
    b = PeriodicPoint((), (0,))
    pe = disjoint_refine(phi, b, Dyadic(1, 0), BUDGET)
    assert_good(pe)
    with pytest.raises(BudgetExceeded):
        disjoint_refine(phi, PeriodicPoint((), (0,)), Dyadic(4, 0), BUDGET)


def test_classifier_trichotomy():
    shape, pe, ev = classify_baire_function(space_function("const-zero"), budget=BUDGET)
    assert isinstance(shape, Constant)
    assert_good(pe)
    shape, pe, ev = classify_baire_function(space_function("baire-identity"), budget=BUDGET)
    assert isinstance(shape, EmbedsIntoBaire)
    assert_good(pe)
    shape, pe, ev = classify_baire_function(space_function("compactify-identity"), budget=BUDGET)
    assert isinstance(shape, EmbedsIntoBaireStar)
    assert_good(pe)


def test_traces_are_json_documents():
    _, pe = shrink_or_discrete(space_function("length"), SCHED, 2, 3, BUDGET)
    text = json.dumps(pe.trace)
    report = recheck(json.loads(text))
    assert report.ok


def test_recheck_detects_tampered_table():
    pe = diameter_shrink(space_function("prefix-embed"), SCHED, 2, 2, BUDGET)
    bad = copy.deepcopy(pe.trace)
    key = next(k for k in bad["table"] if k)
    bad["table"][key] = bad["table"][""]
    report = recheck(bad)
    assert not report.ok


def test_recheck_detects_tampered_certificate():
    _, pe = epsilon_discrete_or_ball(space_function("entry-sum"), Dyadic(1, 0), (), 2, 2, BUDGET)
    bad = copy.deepcopy(pe.trace)
    touched = False
    for cert in bad["certificates"]:
        if "bound" in cert:
            cert["bound"] = "64"
            touched = True
            break
    assert touched
    report = recheck(bad)
    assert not report.ok
