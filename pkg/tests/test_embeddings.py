import random

import pytest

from seqstar.embeddings import (
    Agrees,
    ContainmentError,
    Disagrees,
    EmbeddingFamily,
    Empty,
    InvalidEmbedding,
    MeetEmbedding,
    Valid,
    Violation,
    amalgamate,
    extend,
    meet_preservation_oracle,
    preimage_cone,
    validate,
)
from seqstar.sequences import (
    AugmentedPoint,
    DepthBudget,
    FinitePoint,
    InfinitePoint,
    PeriodicPoint,
    is_prefix,
    meet,
    nodes_in_range,
    restrict,
)
from seqstar.topology import Cone


def random_child_map(rng, depth, branch, width=3):
    """Build a genuine embedding by choosing a root and per-child words."""
    root = tuple(rng.randrange(width) for _ in range(rng.randrange(2)))

    memo = {(): root}

    def img(t):
        if t not in memo:
            parent = img(t[:-1])
            # distinct fork coordinate per sibling, then a random tail
            tail = tuple(rng.randrange(width) for _ in range(rng.randrange(2)))
            memo[t] = parent + (t[-1],) + tail
        return memo[t]

    return {t: img(t) for t in nodes_in_range(depth, branch)}


def mutate(table, rng):
    t = rng.choice([k for k in table if k])
    bad = dict(table)
    bad[t] = table[t[:-1]]  # break strict extension at t
    return bad


def test_validate_accepts_prefix_and_identity():
    assert isinstance(validate(MeetEmbedding.prefix((0,)).apply, 4, 3), Valid)
    assert isinstance(validate(MeetEmbedding.identity().apply, 4, 3), Valid)


def test_validate_rejects_constant_map():
    v = validate(lambda t: (), 3, 2)
    assert isinstance(v, Violation)


def test_validate_matches_meet_oracle_on_generated_candidates():
    rng = random.Random(3)
    for k in range(40):
        table = random_child_map(rng, 3, 3)
        if k % 2:
            table = mutate(table, rng)
        v = validate(table, 3, 3)
        o = meet_preservation_oracle(table.__getitem__, 3, 3)
        assert isinstance(v, Valid) == isinstance(o, Agrees)


def test_meet_preservation_holds_for_valid_tables():
    rng = random.Random(5)
    for _ in range(10):
        table = random_child_map(rng, 3, 3)
        for s in table:
            for t in table:
                assert meet(table[s], table[t]) == table[meet(s, t)]


def test_amalgamation_worked_example():
    # family pi_t(u) = t + u
    fam = EmbeddingFamily(lambda t: MeetEmbedding.prefix(t))
    pi = amalgamate(fam, 3, 3)
    assert pi.apply(()) == ()
    assert pi.apply((1,)) == (1, 1)
    assert pi.apply((1, 2)) == (1, 1, 2, 1, 2)
    assert pi.apply((0, 0)) == (0, 0, 0, 0, 0)
    assert isinstance(meet_preservation_oracle(pi.apply, 3, 3), Agrees)


def test_amalgamation_product_passes_oracle_for_seeded_families():
    rng = random.Random(9)
    for _ in range(12):
        shift = tuple(rng.randrange(2) for _ in range(rng.randrange(2)))
        fam = EmbeddingFamily(lambda t, s=shift: MeetEmbedding.prefix(t + s))
        pi = amalgamate(fam, 3, 3)
        assert isinstance(meet_preservation_oracle(pi.apply, 3, 3), Agrees)


def test_amalgamation_rejects_factors_leaving_the_cone():
    # the identity at every node does not map N_t into N_t
    fam = EmbeddingFamily(lambda t: MeetEmbedding.identity())
    with pytest.raises(ContainmentError):
        amalgamate(fam, 2, 2)


def test_extension_on_point_kinds():
    pi = MeetEmbedding.prefix((0,))
    assert extend(pi, FinitePoint((1,))) == FinitePoint((0, 1))
    q = extend(pi, AugmentedPoint((1,)))
    assert isinstance(q, AugmentedPoint) and q.seq == (0, 1)
    b = extend(pi, PeriodicPoint((), (2,)))
    assert restrict(b, 4).seq == (0, 2, 2, 2)


def test_extension_law_on_table_nodes():
    rng = random.Random(13)
    table = random_child_map(rng, 3, 3)
    pi = MeetEmbedding.from_table(table)
    for t in nodes_in_range(2, 3):
        img = extend(pi, AugmentedPoint(t))
        assert isinstance(img, AugmentedPoint)
        assert img.seq == pi.apply(t)


def test_extension_injective_on_samples():
    rng = random.Random(17)
    table = random_child_map(rng, 3, 3)
    pi = MeetEmbedding.from_table(table)
    pts = [FinitePoint(t) for t in nodes_in_range(2, 3)]
    pts += [AugmentedPoint(t) for t in nodes_in_range(2, 3)]
    imgs = [extend(pi, p) for p in pts]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert imgs[i] != imgs[j]


def test_composition_extension_law():
    a = MeetEmbedding.prefix((1,))
    b = MeetEmbedding.prefix((0, 2))
    c = a.compose(b)
    for t in nodes_in_range(2, 3):
        assert c.apply(t) == a.apply(b.apply(t))
    p = PeriodicPoint((), (1,))
    lhs = extend(c, p)
    rhs = extend(a, extend(b, p))
    assert restrict(lhs, 8).seq == restrict(rhs, 8).seq


def test_closedness_surrogates_on_samples():
    rng = random.Random(19)
    table = random_child_map(rng, 3, 3)
    pi = MeetEmbedding.from_table(table)
    nodes = nodes_in_range(3, 3)
    for s in nodes:
        for k in range(len(s) + 1):
            assert pi.apply(s)[: len(pi.apply(s[:k]))] == pi.apply(s[:k])
    for s in nodes:
        for t in nodes:
            assert meet(pi.apply(s), pi.apply(t)) == pi.apply(meet(s, t))


def test_preimage_cone_examples():
    pi = MeetEmbedding.prefix((0,))
    r = preimage_cone(pi, (0, 1), 4, 3)
    assert r == Cone((1,))
    r = preimage_cone(pi, (0,), 4, 3)
    assert r == Cone(())
    r = preimage_cone(pi, (5,), 4, 3)
    assert isinstance(r, Empty) and r.range_limited


def test_invalid_table_raises_on_use():
    bad = {(): (), (0,): (), (1,): (1,)}
    pi = MeetEmbedding.from_table(bad)
    with pytest.raises(InvalidEmbedding):
        pi.apply((0,))
