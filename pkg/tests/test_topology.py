import itertools
import random

import pytest

from seqstar.metric import Dyadic, weight_schedule
from seqstar.sequences import AugmentedPoint, FinitePoint, PeriodicPoint
from seqstar.topology import (
    Cone,
    ConeMinus,
    Counterexample,
    Covers,
    Singleton,
    basic_member,
    cover_decide,
    covers_cone,
    neighborhood_of,
    representatives,
    uncovered_descent,
)

ZEROS = PeriodicPoint((), (0,))


def test_basic_member_examples():
    assert basic_member(Singleton((1,)), FinitePoint((1,)))
    assert not basic_member(Singleton((1,)), AugmentedPoint((1,)))
    assert basic_member(Cone(()), AugmentedPoint((5,)))
    assert not basic_member(Cone((2,)), FinitePoint(()))
    assert basic_member(ConeMinus((), 2), AugmentedPoint(()))
    assert basic_member(ConeMinus((), 2), FinitePoint((7,)))
    assert not basic_member(ConeMinus((), 2), ZEROS)


def test_neighborhood_examples():
    sched = weight_schedule()
    n = neighborhood_of(FinitePoint((0,)), Dyadic(1, 5), sched)
    assert n == Singleton((0,))
    n = neighborhood_of(ZEROS, Dyadic(1, 2), sched)
    assert n == Cone((0, 0, 0))
    n = neighborhood_of(AugmentedPoint(()), Dyadic(1, 2), sched)
    assert n == ConeMinus((), 2)


def test_cone_partition_law():
    # Cone(t) = {t} ∪ Cone(t+(j,)) for j<i ∪ ConeMinus(t,i), pairwise disjoint
    t, i = (1,), 2
    parts = [Singleton(t)] + [Cone(t + (j,)) for j in range(i)] + [ConeMinus(t, i)]
    for p in representatives(parts + [Cone(t)]):
        inside = basic_member(Cone(t), p)
        hits = sum(basic_member(B, p) for B in parts)
        assert hits == (1 if inside else 0)


FULL_COVER = [Singleton(()), ConeMinus((), 3), Cone((0,)), Cone((1,)), Cone((2,))]
BROKEN_COVER = [Singleton(()), ConeMinus((), 3), Cone((0,)), Cone((2,))]


def test_cover_decide_worked_families():
    assert isinstance(cover_decide([Cone(())]), Covers)
    assert isinstance(cover_decide(FULL_COVER), Covers)
    r = cover_decide(BROKEN_COVER)
    assert isinstance(r, Counterexample)
    assert r.point == FinitePoint((1,))


def random_points(rng, n):
    for _ in range(n):
        t = tuple(rng.randrange(5) for _ in range(rng.randrange(5)))
        k = rng.randrange(3)
        if k == 0:
            yield FinitePoint(t)
        elif k == 1:
            yield AugmentedPoint(t)
        else:
            yield PeriodicPoint(t, (rng.randrange(3),))


def test_cover_decide_soundness_by_sampling():
    rng = random.Random(11)
    for family in ([Cone(())], FULL_COVER, BROKEN_COVER, [], [Singleton(())]):
        decided = cover_decide(family)
        if isinstance(decided, Covers):
            for p in random_points(rng, 2000):
                assert any(basic_member(B, p) for B in family)
        else:
            assert not any(basic_member(B, decided.point) for B in family)


def test_uncovered_descent_examples():
    assert uncovered_descent([]) == FinitePoint(())
    p = uncovered_descent([Singleton(())])
    assert p != FinitePoint(())
    p = uncovered_descent([ConeMinus((), 1), Singleton(())])
    assert basic_member(Cone((0,)), p)


def test_uncovered_descent_agrees_with_decision():
    for family in (BROKEN_COVER, [Singleton(())], [Cone((0,)), Cone((1,))]):
        p = uncovered_descent(family)
        assert not any(basic_member(B, p) for B in family)


def test_descent_requires_non_cover():
    with pytest.raises(ValueError):
        uncovered_descent([Cone(())])


def test_covers_cone_restricted():
    assert covers_cone([Cone((1,))], (1,))
    assert not covers_cone([Singleton((1,))], (1,))
