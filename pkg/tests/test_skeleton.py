from math import gcd

import pytest
from hypothesis import given, strategies as st

from atlas.atbd import from_polygon, rational_blowdown
from atlas.errors import BadInput, UnsupportedShape
from atlas.fillings import bdpq, lisca_fillings
from atlas.polygon import minimal_resolution, wedge_polygon
from atlas.skeleton import (
    CWComplex,
    Group,
    boundary_squared,
    bdpq_skeleton,
    chain_with_vertex,
    cylinder_with_thimbles,
    filling_skeleton,
    homology,
    pi1_report,
    torus_complex,
)


def is_zero(mat):
    return all(x == 0 for row in mat for x in row)


def test_bdpq_skeleton_cells():
    c = bdpq_skeleton(1, 2, 1)
    assert (c.n0, len(c.edges), len(c.faces)) == (1, 1, 1)
    assert c.faces[0] == {0: 2}
    assert [f for f in bdpq_skeleton(2, 2, 1).faces] == [{0: 2}, {0: 2}]


def test_bdpq_skeleton_rejects():
    with pytest.raises(BadInput):
        bdpq_skeleton(1, 4, 2)
    with pytest.raises(BadInput):
        bdpq_skeleton(0, 2, 1)


@pytest.mark.parametrize("d, p, q, h1, h2", [
    (1, 2, 1, Group(0, (2,)), Group(0)),
    (2, 2, 1, Group(0, (2,)), Group(1)),
    (1, 1, 1, Group(0), Group(0)),
])
def test_bdpq_homology_examples(d, p, q, h1, h2):
    rep = homology(bdpq_skeleton(d, p, q))
    assert rep.H0 == Group(1) and rep.H1 == h1 and rep.H2 == h2


def test_torus_homology():
    rep = homology(torus_complex())
    assert (rep.H0, rep.H1, rep.H2) == (Group(1), Group(2), Group(1))


def test_bdpq_homology_sweep():
    for d in range(1, 6):
        for p in range(1, 7):
            for q in range(1, p + 1):
                if gcd(p, q) != 1:
                    continue
                expected = (Group(1), Group(0, (p,) if p > 1 else ()), Group(d - 1))
                for c in (bdpq_skeleton(d, p, q), filling_skeleton(bdpq(d, p, q))):
                    rep = homology(c)
                    assert (rep.H0, rep.H1, rep.H2) == expected
                    assert is_zero(boundary_squared(c))


def test_b131_region_skeleton():
    R, _, edges = minimal_resolution(wedge_polygon(36, 13), 0)
    c = filling_skeleton(rational_blowdown(from_polygon(R), edges[1:3]))
    assert c.shape == "chain-with-vertex" and c.windings == (3,)
    assert pi1_report(c) == "trivial"


def test_lisca_skeletons_36_13():
    reports = {f.zcf: pi1_report(f.skeleton) for f in lisca_fillings(36, 13) if f.b2 == 1}
    assert sorted(reports.values()) == ["Z/2", "trivial"]
    winding_two_four = [f for f in lisca_fillings(36, 13) if f.skeleton.windings == (2, 4)]
    assert winding_two_four and winding_two_four[0].skeleton.shape == "cylinder-with-thimbles"


@pytest.mark.parametrize("windings, expected", [((2, 4), "Z/2"), ((1, 7), "trivial"), ((6, 9), "Z/3")])
def test_pi1_cylinder(windings, expected):
    assert pi1_report(cylinder_with_thimbles(windings)) == expected


def test_pi1_unsupported():
    with pytest.raises(UnsupportedShape):
        pi1_report(torus_complex())


@given(st.lists(st.integers(1, 12), min_size=1, max_size=5))
def test_pi1_abelianizes(windings):
    c = cylinder_with_thimbles(windings)
    assert is_zero(boundary_squared(c))
    m = 0
    for w in windings:
        m = gcd(m, w)
    h1 = homology(c).H1
    assert h1 == (Group(0) if m == 1 else Group(0, (m,)))


@given(st.lists(st.tuples(st.booleans(), st.lists(st.integers(1, 6), max_size=3)), min_size=1, max_size=4))
def test_chain_with_vertex_simply_connected(surfaces):
    c = chain_with_vertex(surfaces)
    assert is_zero(boundary_squared(c))
    assert pi1_report(c) == "trivial"
    assert homology(c).H1 == Group(0)


@given(st.integers(1, 4), st.integers(0, 4), st.data())
def test_random_complex_boundary_squared(n0, n_edges, data):
    c = CWComplex(n0)
    for _ in range(n_edges):
        c.add_edge(data.draw(st.integers(0, n0 - 1)), data.draw(st.integers(0, n0 - 1)))
    loops = [i for i, (a, b) in enumerate(c.edges) if a == b]
    for _ in range(data.draw(st.integers(0, 3))):
        if loops:
            c.add_face({data.draw(st.sampled_from(loops)): data.draw(st.integers(-3, 3))})
    assert is_zero(boundary_squared(c))
