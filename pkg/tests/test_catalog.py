import json

import pytest

from seqstar.catalog import (
    CertifiedPairing,
    Const,
    DisjointUnion,
    INFTY,
    Inclusion,
    InclusionAfterP,
    Left,
    Mismatch,
    Right,
    SpaceTag,
    UnionWithP,
    catalog_a,
    catalog_b,
    descriptor_to_json,
    domain_of,
    embed_via,
    evaluate,
    project_p,
    tag_member,
)
from seqstar.embeddings import MeetEmbedding
from seqstar.registry import space_function
from seqstar.sequences import AugmentedPoint, DepthBudget, DomainMismatch, FinitePoint, PeriodicPoint

BUDGET = DepthBudget(depth=48, branch=32, steps=1_000_000)


def test_counts():
    assert len(catalog_a()) == 24
    assert len(catalog_b()) == 27


def test_catalogs_structurally_distinct():
    a = [json.dumps(descriptor_to_json(f), sort_keys=True) for f in catalog_a()]
    b = [json.dumps(descriptor_to_json(f), sort_keys=True) for f in catalog_b()]
    assert len(set(a)) == 24
    assert len(set(b)) == 27
    assert set(a) <= set(b)


def test_b_adds_exactly_the_union_forms():
    extra = [f for f in catalog_b() if isinstance(f, UnionWithP)]
    assert len(extra) == 3
    assert all(not isinstance(f, UnionWithP) for f in catalog_a())


def test_every_entry_is_a_disjoint_union_of_valid_parts():
    for f in catalog_a():
        assert isinstance(f, DisjointUnion)
        assert tag_member(domain_of(f.baire_part), PeriodicPoint((), (0,)))
        assert not tag_member(domain_of(f.rest_part), PeriodicPoint((), (0,)))


def test_tag_membership_atoms():
    assert tag_member(SpaceTag.Baire, PeriodicPoint((), (1,)))
    assert not tag_member(SpaceTag.Baire, FinitePoint(()))
    assert tag_member(SpaceTag.Seq_, FinitePoint(()))
    assert not tag_member(SpaceTag.Seq_, AugmentedPoint(()))
    assert tag_member(SpaceTag.SeqStar, AugmentedPoint((2,)))
    assert tag_member(SpaceTag.SeqStar, FinitePoint((2,)))


def test_project_p():
    assert project_p(AugmentedPoint((1, 2))) == (1, 2)
    with pytest.raises(DomainMismatch):
        project_p(PeriodicPoint((), (1,)))


def test_evaluate_tags_union_sides():
    f = next(x for x in catalog_a()
             if isinstance(x.baire_part, Inclusion) and isinstance(x.rest_part, InclusionAfterP))
    v = evaluate(f, PeriodicPoint((), (1,)), BUDGET)
    assert isinstance(v.payload, Left)
    v = evaluate(f, AugmentedPoint((3,)), BUDGET)
    assert isinstance(v.payload, Right)


def test_evaluate_const_and_infty():
    f = DisjointUnion(Const(SpaceTag.Baire), Const(SpaceTag.BaireStarMinusBaire))
    v = evaluate(f, PeriodicPoint((), (2,)), BUDGET)
    assert v.payload.payload is INFTY


def test_evaluate_rejects_points_outside_domain():
    f = catalog_a()[0]
    with pytest.raises(DomainMismatch):
        evaluate(f.baire_part, FinitePoint((1,)), BUDGET)


def test_embed_via_injective_function_pairs():
    f = next(x for x in catalog_a()
             if isinstance(x.baire_part, Inclusion) and isinstance(x.rest_part, InclusionAfterP))
    phi = space_function("compactify-identity")
    samples = [PeriodicPoint((i,), (1,)) for i in range(4)]
    samples += [AugmentedPoint((i,)) for i in range(4)]
    r = embed_via(MeetEmbedding.prefix((0,)), f, phi, samples, BUDGET)
    assert isinstance(r, CertifiedPairing)
    assert len(r.psi) == len(samples)


def test_embed_via_constant_function_mismatches():
    f = DisjointUnion(Const(SpaceTag.Baire), Const(SpaceTag.BaireStarMinusBaire))
    phi = space_function("compactify-identity")
    samples = [AugmentedPoint(()), AugmentedPoint((1,))]
    r = embed_via(MeetEmbedding.identity(), f, phi, samples, BUDGET)
    assert isinstance(r, Mismatch)
    assert r.witness == AugmentedPoint((1,))


def test_descriptor_json_round_trips_by_equality():
    for f in catalog_b():
        d = descriptor_to_json(f)
        assert json.dumps(d)  # serializable
        assert d["kind"] in {"disjoint_union", "union_with_p"}
