from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, strategies as st

from atlas.contfrac import hj_expand
from atlas.errors import (
    CornerAlreadyDelzant,
    DegenerateIntersection,
    EmptyIntersection,
    NonCompactEdge,
    NonIntegralPolygon,
)
from atlas.exactlat import AffineMap, IntMat2, wedge
from atlas.polygon import (
    CornerType,
    HalfPlane,
    RatPolygon,
    affine_length,
    affine_length_of,
    binomial_relations,
    corner_type,
    cut_corner,
    edge_sphere_selfint,
    from_halfplanes,
    is_delzant,
    lattice_points,
    minimal_resolution,
    resolution_direction,
    truncate,
    wedge_polygon,
)
from strategies import affine_maps, lattice_polygons, sl2

F = Fraction
SIMPLEX = RatPolygon(((0, 0), (1, 0), (0, 1)))
SQUARE = RatPolygon(((0, 0), (1, 0), (1, 1), (0, 1)))
NON_DELZANT = RatPolygon(((0, 0), (2, 1), (0, 1)))


def same_cycle(a, b):
    a, b = list(a), list(b)
    return len(a) == len(b) and any(a[i:] + a[:i] == b for i in range(len(a)))


def test_from_halfplanes_square():
    hs = [HalfPlane((1, 0), 0), HalfPlane((-1, 0), -1), HalfPlane((0, 1), 0), HalfPlane((0, -1), -1)]
    assert same_cycle(from_halfplanes(hs).vertices, SQUARE.vertices)


def test_from_halfplanes_simplex():
    hs = [HalfPlane((1, 0), 0), HalfPlane((0, 1), 0), HalfPlane((-1, -1), -1)]
    assert same_cycle(from_halfplanes(hs).vertices, SIMPLEX.vertices)


def test_from_halfplanes_empty():
    with pytest.raises(EmptyIntersection):
        from_halfplanes([HalfPlane((1, 0), 1), HalfPlane((-1, 0), 0), HalfPlane((0, 1), 0)])


@given(lattice_polygons())
def test_halfplane_round_trip(P):
    assert same_cycle(from_halfplanes(P.to_halfplanes()).vertices, P.vertices)


def test_affine_length_examples():
    assert affine_length_of((0, 0), (2, 1)) == 1
    assert affine_length(NON_DELZANT, 1) == 2
    D112 = RatPolygon(((0, 0), (6, 0), (0, F(3, 2))))
    assert affine_length(D112, 1) == F(3, 2)


def test_affine_length_unbounded():
    W = wedge_polygon(2, 1)
    lengths = [affine_length(W, i) for i in range(W.edge_count())]
    assert all(x == float("inf") for x in lengths)


def test_corner_type_examples():
    assert corner_type(SQUARE, 0)[0] == CornerType(1, 0)
    assert corner_type(NON_DELZANT, 0)[0] == CornerType(2, 1)
    assert corner_type(wedge_polygon(3, 2), 0)[0] == CornerType(3, 2)


def test_corner_type_map_normalizes():
    ct, T = corner_type(NON_DELZANT, 0)
    Q = NON_DELZANT.transform(T)
    i = Q.vertices.index((0, 0))
    u, w = Q.incoming_outgoing(i)
    assert u == (0, -1) and w == (ct.n, ct.a)


def test_is_delzant():
    assert is_delzant(SQUARE)
    assert not is_delzant(NON_DELZANT)
    assert not is_delzant(wedge_polygon(4, 1))


@given(lattice_polygons(), affine_maps())
def test_corner_type_and_length_invariant(P, T):
    Q = P.transform(T)
    for i in range(len(P.vertices)):
        j = Q.vertices.index(T(P.vertices[i]))
        assert corner_type(P, i)[0] == corner_type(Q, j)[0]
    assert sorted(affine_length(P, i) for i in range(P.edge_count())) == \
        sorted(affine_length(Q, i) for i in range(Q.edge_count()))


@given(lattice_polygons(), affine_maps(det_one=False))
def test_reflections_invert_residue(P, T):
    assume(T.A.det == -1)
    Q = P.transform(T)
    for i in range(len(P.vertices)):
        a = corner_type(P, i)[0]
        b = corner_type(Q, Q.vertices.index(T(P.vertices[i])))[0]
        assert a.n == b.n
        assert a.n == 1 or (a.a * b.a) % a.n == 1


def test_truncate_blow_up_simplex():
    big = RatPolygon(((0, 0), (3, 0), (0, 3)))
    Q = truncate(big, HalfPlane((1, 1), 1))
    assert same_cycle(Q.vertices, [(1, 0), (3, 0), (0, 3), (0, 1)])
    assert is_delzant(Q)


def test_truncate_square_to_hexagon():
    sq = RatPolygon(((0, 0), (2, 0), (2, 2), (0, 2)))
    Q = truncate(truncate(sq, HalfPlane((1, 1), 1)), HalfPlane((-1, -1), -3))
    assert len(Q.vertices) == 6 and is_delzant(Q)


@given(lattice_polygons(bound=4), st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.fractions(-10, 10, max_denominator=3))
def test_truncate_matches_halfplane_intersection(P, normal, bound):
    assume(normal != (0, 0))
    h = HalfPlane(normal, bound)
    try:
        expected = from_halfplanes(P.to_halfplanes() + [h])
    except (EmptyIntersection, DegenerateIntersection) as exc:
        with pytest.raises(type(exc)):
            truncate(P, h)
        return
    assert same_cycle(truncate(P, h).vertices, expected.vertices)


@given(st.integers(1, 9), st.integers(0, 8), st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.integers(-6, 6))
def test_truncate_wedge_matches_halfplane_intersection(n, a, normal, bound):
    assume(gcd(n, a) == 1 and a < n and normal != (0, 0))
    W, h = wedge_polygon(n, a), HalfPlane(normal, bound)
    try:
        expected = from_halfplanes(W.to_halfplanes() + [h])
    except (EmptyIntersection, DegenerateIntersection):
        return
    got = truncate(W, h)
    assert (got.lead, got.trail) == (expected.lead, expected.trail)
    assert same_cycle(got.vertices, expected.vertices) if got.is_compact else got == expected


def test_truncate_empty():
    with pytest.raises(EmptyIntersection):
        truncate(SQUARE, HalfPlane((1, 0), 5))


def blow_up(P, i):
    u, w = P.incoming_outgoing(i)
    n = P.edge_count()
    size = min(affine_length(P, (i - 1) % n), affine_length(P, i)) / 3
    return cut_corner(P, i, resolution_direction(u, w), size)[0]


@given(st.lists(st.integers(0, 20), max_size=5), sl2())
def test_delzant_truncation_stays_delzant(choices, A):
    P = RatPolygon(((0, 0), (4, 0), (4, 4), (0, 4))).transform(AffineMap(A, (0, 0)))
    for c in choices:
        P = blow_up(P, c % len(P.vertices))
        assert is_delzant(P)
    ds = P.directions()
    for k in range(len(ds)):
        assert wedge(ds[k], ds[(k + 1) % len(ds)]) >= 1


def test_edge_sphere_selfint_examples():
    assert [edge_sphere_selfint(SIMPLEX, i) for i in range(3)] == [1, 1, 1]
    for n in range(1, 6):
        On = RatPolygon(((0, 1), (1, 0)), lead=(0, 1), trail=(n, 1))
        assert edge_sphere_selfint(On, 1) == -n


def test_edge_sphere_selfint_noncompact():
    with pytest.raises(NonCompactEdge):
        edge_sphere_selfint(wedge_polygon(2, 1), 0)


def test_minimal_resolution_examples():
    _, chain, edges = minimal_resolution(wedge_polygon(3, 2), 0)
    assert chain == [-2, -2]
    R = minimal_resolution(wedge_polygon(3, 2), 0)[0]
    assert [edge_sphere_selfint(R, e) for e in edges] == [-2, -2]
    assert minimal_resolution(wedge_polygon(36, 13), 0)[1] == [-3, -5, -2, -2]
    for n in range(2, 8):
        assert minimal_resolution(wedge_polygon(n, 1), 0)[1] == [-n]


def test_minimal_resolution_delzant_corner():
    with pytest.raises(CornerAlreadyDelzant):
        minimal_resolution(SQUARE, 0)


def test_minimal_resolution_matches_hj_to_50():
    for n in range(2, 51):
        for a in range(1, n):
            if gcd(n, a) == 1:
                R, chain, _ = minimal_resolution(wedge_polygon(n, a), 0)
                assert chain == [-c for c in hj_expand(n, a)]
                assert is_delzant(R)


def test_lattice_points():
    assert len(lattice_points(SIMPLEX)) == 3
    assert len(lattice_points(RatPolygon(((0, 0), (2, 0), (0, 2))))) == 6
    assert lattice_points(SQUARE) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_lattice_points_needs_integral():
    with pytest.raises(NonIntegralPolygon):
        lattice_points(RatPolygon(((0, 0), (F(1, 2), 0), (0, 1))))


def test_binomial_relations_examples():
    assert binomial_relations([(0, 0), (1, 0), (0, 1), (1, 1)]) in ([(1, -1, -1, 1)], [(-1, 1, 1, -1)])
    assert binomial_relations([(0, 0), (1, 0), (2, 0)]) in ([(1, -2, 1)], [(-1, 2, -1)])
    assert len(binomial_relations(lattice_points(RatPolygon(((0, 0), (2, 0), (0, 2)))))) == 3


@given(lattice_polygons(bound=3))
def test_binomial_relations_kernel(P):
    pts = lattice_points(P)
    rels = binomial_relations(pts)
    for a in rels:
        assert sum(ai * p[0] for ai, p in zip(a, pts)) == 0
        assert sum(ai * p[1] for ai, p in zip(a, pts)) == 0
        assert sum(a) == 0
    assert len(rels) == len(pts) - 3


def test_json_round_trip():
    for P in (NON_DELZANT, wedge_polygon(9, 2), RatPolygon(((0, 0), (6, 0), (0, F(3, 2))))):
        assert RatPolygon.from_json(P.to_json()) == P
