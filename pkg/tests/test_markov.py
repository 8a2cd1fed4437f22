import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from atlas.atbd import validate
from atlas.contfrac import QuadraticSurd
from atlas.errors import IrrationalLengths, NonIntegralMutation, NotMarkov, BadInput
from atlas.polygon import CornerType, affine_length_of, corner_type
from atlas.markov import (
    ViannaData,
    affinely_equivalent,
    corner_points,
    descend,
    enumerate_triples,
    is_markov,
    mutate,
    mutate_geometry,
    triangle_geometry,
    vianna_from_markov,
    vianna_mutate,
)

F = Fraction
D111 = ViannaData((1, 1, 1), (1, 1, 1), (3, 3, 3))


def brute_force_triples(bound):
    return sorted((a, b, c) for a in range(1, bound + 1) for b in range(a, bound + 1)
                  for c in range(b, bound + 1) if a * a + b * b + c * c == 3 * a * b * c)


@pytest.mark.parametrize("t, expected", [((1, 1, 1), True), ((1, 2, 5), True), ((1, 2, 3), False),
                                         ((0, 0, 0), False)])
def test_is_markov(t, expected):
    assert is_markov(*t) is expected


def test_mutate_examples():
    assert mutate((1, 1, 1), 3) == (1, 1, 2)
    assert mutate((1, 1, 2), 2) == (1, 5, 2)
    with pytest.raises(NotMarkov):
        mutate((1, 2, 3), 1)
    with pytest.raises(BadInput):
        mutate((1, 1, 1), 4)


@given(st.lists(st.integers(1, 3), max_size=12), st.integers(1, 3))
def test_mutate_is_involution(word, k):
    t = (1, 1, 1)
    for j in word:
        t = mutate(t, j)
    assert is_markov(*t)
    assert mutate(mutate(t, k), k) == t


def test_descend_examples():
    assert descend((1, 1, 1)) == []
    assert len(descend((1, 2, 5))) == 2
    assert len(descend((2, 5, 29))) == 3
    with pytest.raises(NotMarkov):
        descend((2, 2, 2))


@given(st.lists(st.integers(1, 3), max_size=15))
def test_descend_strictly_decreasing(word):
    t = (1, 1, 1)
    for j in word:
        t = mutate(t, j)
    prev = max(t)
    path = descend(t)
    for _, s in path:
        assert max(s) < prev or max(s) == 1
        prev = max(s)
    if path:
        assert path[-1][1] == (1, 1, 1)


def test_enumerate_examples():
    assert enumerate_triples(2) == [(1, 1, 1), (1, 1, 2)]
    assert (1, 2, 5) in enumerate_triples(5)
    assert {(1, 5, 13), (2, 5, 29)} <= set(enumerate_triples(30))


def test_enumerate_matches_brute_force():
    assert enumerate_triples(200) == brute_force_triples(200)


def test_vianna_mutation_examples():
    a = vianna_mutate(D111, 3)
    assert a.p == (1, 1, 2) and a.ell == (F(3, 2), F(3, 2), 6)
    b = vianna_mutate(a, 1)
    assert b.p == (5, 1, 2) and b.ell == (F(15, 2), F(3, 10), F(6, 5))
    assert vianna_mutate(a, 3).p == D111.p and vianna_mutate(a, 3).ell == D111.ell
    assert (b.K, b.L) == (9, 9)


def test_vianna_non_integral():
    v = ViannaData((1, 1, 1), (2, 3, 1), (3, 3, 3))
    with pytest.raises(NonIntegralMutation):
        vianna_mutate(v, 2)


def test_vianna_general_d():
    v = ViannaData.from_constants((1, 2, 3), (1, 1, 1), 6)
    assert v.invariants_hold() and v.K == 6
    w = vianna_mutate(v, 1)
    assert w.p == (5, 1, 1) and w.invariants_hold() and w.K == v.K and w.L == v.L
    irr = ViannaData.from_constants((1, 1, 2), (1, 1, 1), 3)
    assert irr.radicand == 6 and irr.invariants_hold()
    with pytest.raises(IrrationalLengths):
        irr.rational_lengths()


@given(st.lists(st.integers(1, 3), max_size=20))
def test_vianna_invariants_along_words(word):
    v = D111
    for k in word:
        v = vianna_mutate(v, k)
        assert v.K == 9 and v.L == 9 and is_markov(*v.p)
        for i in range(3):
            assert v.ell[i] == F(3 * v.p[i], v.p[(i + 1) % 3] * v.p[(i + 2) % 3])


def test_vianna_from_markov():
    assert vianna_from_markov(1, 1, 1).ell == (3, 3, 3)
    assert vianna_from_markov(1, 1, 2).ell == (F(3, 2), F(3, 2), 6)
    assert sorted(vianna_from_markov(1, 2, 5).rational_lengths()) == [F(3, 10), F(6, 5), F(15, 2)]
    with pytest.raises(NotMarkov):
        vianna_from_markov(1, 2, 3)


@pytest.mark.parametrize("t", [(1, 1, 1), (1, 1, 2), (1, 2, 5), (1, 5, 13), (2, 5, 29)])
def test_triangle_geometry_corners_and_lengths(t):
    v = vianna_from_markov(*t)
    d = triangle_geometry(v)
    assert validate(d).ok
    P = corner_points(d)
    for k in range(3):
        i = d.polygon.vertices.index(P[k])
        p, q = v.p[k], v.q[k]
        assert corner_type(d.polygon, i)[0] == CornerType(p * p, (p * q - 1) % (p * p))
        assert affine_length_of(P[(k + 1) % 3], P[(k + 2) % 3]) == v.ell[k]


def test_triangle_geometry_112():
    d = triangle_geometry(vianna_from_markov(1, 1, 2))
    assert set(d.polygon.vertices) == {(0, 0), (0, F(3, 2)), (6, 0)}


def test_geometry_commutes_with_data():
    rng = random.Random(11)
    for _ in range(10):
        v, d = D111, triangle_geometry(D111)
        for _ in range(rng.randint(1, 4)):
            k = rng.randint(1, 3)
            v, d = vianna_mutate(v, k), mutate_geometry(d, k)
            assert affinely_equivalent(d.polygon, triangle_geometry(v).polygon)
            P = corner_points(d)
            assert [affine_length_of(P[(i + 1) % 3], P[(i + 2) % 3]) for i in range(3)] == list(v.ell)
