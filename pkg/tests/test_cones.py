import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from atlas.cones import (
    AffineCone,
    ConeClass,
    classify,
    cycle_slope_check,
    eigen_slopes,
    is_eigenray,
    ray_equivalent,
    resolve_cone,
    wedge_domain,
)
from atlas.errors import EigenrayDegenerate, FiniteOrderUnsupported, NotSL2
from atlas.exactlat import IntMat2, wedge
from strategies import sl2

HYP = IntMat2(2, 1, 1, 1)


def random_hyperbolic(rng, max_trace=10):
    while True:
        M = IntMat2.identity()
        for _ in range(rng.randint(1, 6)):
            k = rng.randint(-3, 3)
            M = M @ (IntMat2(1, k, 0, 1) if rng.random() < 0.5 else IntMat2(1, 0, k, 1))
        if 2 < M.trace <= max_trace:
            return M


def rays(bound=6):
    r = range(-bound, bound + 1)
    return [(a, b) for a in r for b in r if gcd(a, b) == 1]


@pytest.mark.parametrize("M, kind", [
    (IntMat2(1, 0, 4, 1), ConeClass.PARABOLIC),
    (HYP, ConeClass.HYPERBOLIC),
    (IntMat2(0, 1, -1, 0), ConeClass.FINITE_ORDER),
    (IntMat2(1, -1, 1, 0), ConeClass.FINITE_ORDER),
    (IntMat2.identity(), ConeClass.IDENTITY),
])
def test_classify(M, kind):
    assert classify(M) is kind


def test_classify_rejects_non_sl2():
    with pytest.raises(NotSL2):
        classify(IntMat2(2, 0, 0, 1))


def test_wedge_domain_parabolic():
    s = wedge_domain(AffineCone(IntMat2(1, 0, 3, 1), (0, 1)))
    assert {s.start, s.end} == {(0, 1), (3, 1)}
    assert s.contains((1, 1)) and not s.contains((-1, 1))


def test_wedge_domain_identity_and_eigenray():
    with pytest.raises(EigenrayDegenerate):
        wedge_domain(AffineCone(IntMat2.identity(), (0, 1)))
    with pytest.raises(EigenrayDegenerate):
        AffineCone(IntMat2(1, 0, 3, 1), (1, 0))


def test_wedge_domain_hyperbolic_in_quadrant():
    s = wedge_domain(AffineCone(HYP, (1, 0)))
    slope = float(eigen_slopes(HYP)[0])
    for ray in [(100, k) for k in range(-300, 300)]:
        if s.contains(ray):
            assert ray[1] / ray[0] < slope


@pytest.mark.parametrize("M, ray", [(IntMat2(1, 0, 3, 1), (0, 1)), (HYP, (0, 1)), (HYP, (1, 0)),
                                    (IntMat2(3, 2, 1, 1), (0, 1))])
def test_translates_tile(M, ray):
    W = wedge_domain(AffineCone(M, ray))
    sectors = []
    A = IntMat2.identity()
    Minv = M.inverse()
    for i in range(-3, 4):
        P = IntMat2.identity()
        for _ in range(abs(i)):
            P = P @ (M if i > 0 else Minv)
        sectors.append(W.image(P))
    for v in rays(8):
        assert sum(1 for s in sectors if s.contains(v)) <= 1


def test_ray_equivalent_examples():
    l = (0, 1)
    assert ray_equivalent(HYP, l, HYP.act(l))
    assert ray_equivalent(HYP, l, (0, -1))
    assert not ray_equivalent(HYP, (0, 1), (1, -1))
    with pytest.raises(EigenrayDegenerate):
        ray_equivalent(IntMat2(1, 0, 2, 1), (1, 0), (0, 1))


def equivalence_classes(M):
    sample = [v for v in rays(4) if not is_eigenray(M, v)]
    classes = []
    for v in sample:
        for c in classes:
            if ray_equivalent(M, c[0], v):
                c.append(v)
                break
        else:
            classes.append([v])
    # the relation must be an equivalence: every pair inside a class relates, none across
    for c in classes:
        for a, b in itertools.combinations(c, 2):
            assert ray_equivalent(M, a, b) and ray_equivalent(M, b, a)
    for c1, c2 in itertools.combinations(classes, 2):
        assert not ray_equivalent(M, c1[0], c2[0])
    return classes


@pytest.mark.parametrize("M, count", [(HYP, 2), (IntMat2(3, 1, 2, 1), 2), (IntMat2(1, 0, 2, 1), 1),
                                      (IntMat2(1, 3, 0, 1), 1)])
def test_ray_classes(M, count):
    assert len(equivalence_classes(M)) == count


@pytest.mark.parametrize("n", range(1, 11))
def test_resolve_parabolic(n):
    r = resolve_cone(AffineCone(IntMat2(1, 0, n, 1), (0, 1)))
    assert r.kind is ConeClass.PARABOLIC
    assert r.self_intersections == (-n,)
    assert cycle_slope_check(r.cycle, r.slope_matrix)


def test_resolve_hyperbolic_delzant_vertex():
    r = resolve_cone(AffineCone(HYP, (0, 1)))
    assert r.cuts == 1 and r.cycle == (3,)
    assert cycle_slope_check(r.cycle, r.slope_matrix)
    assert not cycle_slope_check((4,), r.slope_matrix)
    assert not cycle_slope_check((), r.slope_matrix)


def test_resolve_finite_order():
    with pytest.raises(FiniteOrderUnsupported):
        resolve_cone(AffineCone(IntMat2(0, 1, -1, 0), (0, 1)))


def test_cycle_slope_random_hyperbolic():
    rng = random.Random(5)
    for _ in range(20):
        M = random_hyperbolic(rng)
        ray = next(v for v in [(0, 1), (1, 0), (1, 1)] if not is_eigenray(M, v))
        r = resolve_cone(AffineCone(M, ray))
        assert cycle_slope_check(r.cycle, r.slope_matrix)


def test_cycle_frame_independent():
    for M in (HYP, IntMat2(5, 2, 2, 1), IntMat2(3, 2, 1, 1)):
        cycles = set()
        for ray in [(0, 1), (1, 0), (1, 2), (-1, 3)]:
            if is_eigenray(M, ray):
                continue
            c = resolve_cone(AffineCone(M, ray)).cycle
            cycles.add(min(c[i:] + c[:i] for i in range(len(c))))
        assert len(cycles) <= 2


def test_resolve_independent_of_sizes():
    M = IntMat2(5, 2, 2, 1)
    base = resolve_cone(AffineCone(M, (0, 1)))
    for sizes in ([Fraction(1, 3)] * 8, [Fraction(1, 7)] * 8):
        r = resolve_cone(AffineCone(M, (0, 1)), sizes)
        assert (r.cycle, r.self_intersections) == (base.cycle, base.self_intersections)
