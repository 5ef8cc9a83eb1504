import itertools
import random

import pytest
from hypothesis import given, strategies as st

from seqstar.metric import Bounded, Dyadic, Exact, SCHEDULES, ball_member, distance, epsilon, weight_schedule
from seqstar.sequences import AugmentedPoint, DepthBudget, FinitePoint, InfinitePoint, PeriodicPoint

SCHED = weight_schedule()


def d(a, b):
    r = distance(a, b, SCHED)
    assert isinstance(r, Exact)
    return r.value


def small_points(max_len=3, max_entry=2):
    pts = []
    for L in range(max_len + 1):
        for t in itertools.product(range(max_entry + 1), repeat=L):
            pts.append(FinitePoint(t))
            pts.append(AugmentedPoint(t))
    return pts


# --- dyadic arithmetic ----------------------------------------------------

def test_dyadic_canonical_form():
    assert Dyadic(4, 2) == Dyadic(1, 0)
    assert Dyadic(6, 3) == Dyadic(3, 2)
    assert Dyadic(0, 7) == Dyadic.zero()


def test_dyadic_parse_round_trip():
    for text in ["0", "1", "5", "1/2", "2^-7", "3·2^-5"]:
        assert str(Dyadic.parse(text)) == text


@given(st.integers(0, 200), st.integers(0, 12), st.integers(0, 200), st.integers(0, 12))
def test_dyadic_ordering_matches_rationals(n1, e1, n2, e2):
    a, b = Dyadic(n1, e1), Dyadic(n2, e2)
    assert (a < b) == (n1 * 2 ** e2 < n2 * 2 ** e1)
    assert (a == b) == (n1 * 2 ** e2 == n2 * 2 ** e1)


def test_schedule_values():
    assert epsilon(SCHED, ()) == Dyadic(1, 0)
    assert epsilon(SCHED, (0,)) == Dyadic(1, 1)
    assert epsilon(SCHED, (0, 2)) == Dyadic(1, 4)
    assert "weight" in SCHEDULES


# --- distances ------------------------------------------------------------

def test_distance_worked_examples():
    assert d(FinitePoint(()), FinitePoint((0,))) == Dyadic(1, 0)
    # split at index 1; the larger restriction inside the tree is (0,5)
    assert d(AugmentedPoint((0,)), FinitePoint((0, 5))) == Dyadic(1, 7)
    assert d(FinitePoint((2,)), FinitePoint((2,))) == Dyadic.zero()


def test_distance_excludes_marked_restrictions():
    # Augmented(()) vs Finite(()): the augmented side's split restriction is
    # the infinity marker, which lies outside the tree, leaving eps at ().
    assert d(AugmentedPoint(()), FinitePoint(())) == Dyadic(1, 0)


def test_distance_infinite_points_equal_periodic():
    a = PeriodicPoint((), (1,))
    b = PeriodicPoint((1, 1), (1,))
    assert d(a, b) == Dyadic.zero()


def test_distance_infinite_budget_gives_bound():
    ones = InfinitePoint(lambda i: (1,) * i)
    also_ones = InfinitePoint(lambda i: (1,) * i)
    r = distance(ones, also_ones, SCHED, DepthBudget(depth=6, steps=50))
    assert isinstance(r, Bounded)
    assert r.upper > Dyadic.zero()


def test_singleton_equals_small_ball():
    # {t} = B(t, eps_t) for finite t: any distinct point is at distance >= eps_t
    for p in small_points(2, 2):
        if not isinstance(p, FinitePoint):
            continue
        eps = epsilon(SCHED, p.seq)
        for q in small_points(2, 2):
            if q != p:
                assert d(p, q) >= eps
        assert ball_member(p, eps, p, SCHED)


def test_exhaustive_ultrametric_small():
    pts = small_points(2, 2)
    table = {}
    for a, b in itertools.combinations(pts, 2):
        v = d(a, b)
        assert v == d(b, a)
        assert v > Dyadic.zero()
        table[(a, b)] = table[(b, a)] = v
    for a in pts:
        assert d(a, a) == Dyadic.zero()
    for a, b, c in itertools.permutations(pts[:12], 3):
        assert table[(a, c)] <= max(table[(a, b)], table[(b, c)])


def test_randomized_ultrametric_mixed():
    rng = random.Random(7)

    def pt():
        t = tuple(rng.randrange(4) for _ in range(rng.randrange(5)))
        k = rng.randrange(3)
        if k == 0:
            return FinitePoint(t)
        if k == 1:
            return AugmentedPoint(t)
        return PeriodicPoint(t, (rng.randrange(3),))

    for _ in range(400):
        a, b, c = pt(), pt(), pt()
        ab, bc, ac = d(a, b), d(b, c), d(a, c)
        assert ac <= max(ab, bc)
        assert ab == d(b, a)
