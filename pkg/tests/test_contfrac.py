import itertools
import random
from fractions import Fraction
from math import gcd, prod, sqrt

import pytest
from hypothesis import given, strategies as st

from atlas.contfrac import (
    INFINITY,
    QuadraticSurd,
    blow_down_at,
    blow_up_at,
    hj_eval,
    hj_expand,
    is_zcf,
    numeric_periodic_value,
    periodic_fixed_point,
    zcf_blow_ups,
    zcf_reduce_to_11,
    zcfs_under_caps,
)
from atlas.errors import BadInput, NotZCF


def zcf_oracle(seq):
    """Right-to-left evaluation: every proper tail positive, the whole zero."""
    x = Fraction(seq[-1])
    for c in reversed(seq[:-1]):
        if x <= 0:
            return False
        x = c - 1 / x
    return x == 0


def brute_force_caps(caps):
    return sorted(c for c in itertools.product(*(range(1, b + 1) for b in caps)) if zcf_oracle(c))


@pytest.mark.parametrize("seq, value", [
    ([2, 2], Fraction(3, 2)),
    ([3, 5, 2, 2], Fraction(36, 13)),
    ([1, 1], 0),
    ([5, 2], Fraction(9, 2)),
])
def test_hj_eval(seq, value):
    assert hj_eval(seq) == value


def test_hj_eval_infinity():
    assert hj_eval([2, 1, 1]) is INFINITY


def test_hj_eval_limit_convention():
    # [1,1,1,1,1] = [1,1,1,0] = [1,1,inf] = [1,1]
    assert hj_eval([1, 1, 1, 1, 1]) == 0
    assert not is_zcf([1, 1, 1, 1, 1])


@pytest.mark.parametrize("n, a, seq", [
    (3, 2, (2, 2)),
    (4, 3, (2, 2, 2)),
    (9, 2, (5, 2)),
    (36, 13, (3, 5, 2, 2)),
])
def test_hj_expand(n, a, seq):
    assert hj_expand(n, a) == seq


@pytest.mark.parametrize("n, a", [(4, 2), (3, 3), (5, 0), (2, 5)])
def test_hj_expand_rejects(n, a):
    with pytest.raises(BadInput):
        hj_expand(n, a)


def test_hj_round_trip_to_200():
    for n in range(2, 201):
        for a in range(1, n):
            if gcd(n, a) == 1:
                s = hj_expand(n, a)
                assert min(s) >= 2
                assert hj_eval(s) == Fraction(n, a)


@given(st.lists(st.integers(2, 6), min_size=1, max_size=8))
def test_all_at_least_two_exceeds_one(seq):
    assert hj_eval(seq) > 1


@pytest.mark.parametrize("seq, expected", [
    ([2, 1, 2], True),
    ([1, 2, 1], True),
    ([1, 1], True),
    ([1, 1, 1, 1, 1], False),
    ([2, 2], False),
    ([3], False),
])
def test_is_zcf(seq, expected):
    assert is_zcf(seq) is expected


def test_blow_ups_of_11():
    assert sorted(zcf_blow_ups([1, 1])) == [(1, 2, 1), (2, 1, 2)]


def test_length_four_are_blow_ups():
    length3 = brute_force_caps([4, 4, 4])
    assert length3 == [(1, 2, 1), (2, 1, 2)]
    ups = {u for s in length3 for u in zcf_blow_ups(s)}
    assert ups == set(brute_force_caps([4] * 4))


def test_blow_ups_not_zcf():
    with pytest.raises(NotZCF):
        zcf_blow_ups([2, 2])


@given(st.integers(0, 6).flatmap(lambda k: st.lists(st.integers(0, 20), min_size=k, max_size=k)))
def test_blow_up_then_down_is_identity(choices):
    s = (1, 1)
    for c in choices:
        s = blow_up_at(s, c % (len(s) + 1))
    assert is_zcf(s)
    for i in range(len(s) + 1):
        t = blow_up_at(s, i)
        assert is_zcf(t)
        assert blow_down_at(t, i) == s


@pytest.mark.parametrize("seq, steps", [((1, 1), 0), ((2, 1, 2), 1), ((1, 2, 1), 1)])
def test_reduce_to_11(seq, steps):
    path = zcf_reduce_to_11(seq)
    assert len(path) == steps == len(seq) - 2
    if path:
        assert path[-1][1] == (1, 1)


def test_reduce_leftmost_tie_break():
    assert zcf_reduce_to_11((1, 2, 1)) == [(0, (1, 1))]


def test_reduce_long_chain():
    s = (1, 1)
    rng = random.Random(3)
    for _ in range(10):
        s = blow_up_at(s, rng.randint(0, len(s)))
    path = zcf_reduce_to_11(s)
    assert len(path) == len(s) - 2 and path[-1][1] == (1, 1)
    assert all(is_zcf(t) for _, t in path)


def test_caps_examples():
    assert zcfs_under_caps([2, 2, 2]) == [(1, 2, 1), (2, 1, 2)]
    assert zcfs_under_caps([2, 2]) == [(1, 1)]
    assert zcfs_under_caps([7]) == []


def test_caps_against_brute_force_small():
    for m in range(1, 7):
        for caps in itertools.product(range(1, 5), repeat=m):
            if prod(caps) <= 400:
                assert zcfs_under_caps(caps) == brute_force_caps(caps)


def test_zero_value_is_not_enough():
    # evaluates to zero through positive and negative tails, so it is no blow-up of [1, 1]
    assert not is_zcf((2, 1, 1, 1, 1, 2))
    assert (2, 1, 1, 1, 1, 2) not in zcfs_under_caps([2] * 6)


def test_periodic_fixed_point_examples():
    assert periodic_fixed_point([2]) == 1
    x = periodic_fixed_point([3])
    assert x == QuadraticSurd(Fraction(3, 2), Fraction(1, 2), 5)
    assert abs(float(x) - numeric_periodic_value([3])) < 1e-12
    assert abs(float(x) - (3 + sqrt(5)) / 2) < 1e-12


@given(st.lists(st.integers(2, 6), min_size=1, max_size=4).filter(lambda s: max(s) >= 3))
def test_periodic_fixed_point_is_fixed(seq):
    x = periodic_fixed_point(seq)
    y = x
    for c in reversed(seq):
        y = c - 1 / y
    assert y == x
    assert abs(float(x) - numeric_periodic_value(seq)) < 1e-9


def test_surd_canonical():
    assert QuadraticSurd(1, 2, 8) == QuadraticSurd(1, 4, 2)
    assert QuadraticSurd(3, 0, 5).D == 0
    assert QuadraticSurd(0, 1, 4) == 2
