"""Lens spaces and their symplectic fillings.

A filling of ``L(n, a)`` is built from a zero continued fraction ``z``
bounded by the reversed expansion ``b = hj_expand(n, n - a)``: take the
toric surface whose boundary chain reads ``-z``, then make ``b_i - z_i``
non-toric blow-ups on the i-th chain edge.  The complement of the chain
together with the two remaining edges is the filling.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .atbd import ATBD, from_polygon, generalized_nodal_trade, nodal_trade, nontoric_blowup
from .contfrac import blow_up_word, hj_expand, is_zcf, zcfs_under_caps
from .errors import AtlasError, BadInput, InvalidDiagram, NotZCF
from .exactlat import Q, add, cokernel, scale, sub, wedge
from .polygon import RatPolygon, affine_length_of, minimal_resolution, wedge_polygon
from .skeleton import CWComplex, Group, InvariantReport, filling_skeleton, homology

BASE_VERTICES = ((0, 4), (0, 0), (2, 0), (4, 2), (4, 4))


@dataclass(frozen=True)
class LensSpace:
    n: int
    a: int

    def __post_init__(self):
        n, a = int(self.n), int(self.a)
        if n <= 0:
            raise BadInput(f"lens space needs n > 0, got {n}")
        if gcd(n, a) != 1:
            raise BadInput(f"gcd({n}, {a}) != 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a % n)

    def __str__(self) -> str:
        return f"L({self.n},{self.a})"


def equivalences(L: LensSpace) -> tuple[LensSpace, LensSpace]:
    """Canonical form and the representative ``L(n, abar)`` with ``a abar = 1 mod n``."""
    if L.n == 1:
        return L, L
    return L, LensSpace(L.n, pow(L.a, -1, L.n))


def _canonical(n: int, a: int) -> LensSpace:
    L = LensSpace(n, a)
    if L.n < 2:
        raise BadInput("need n >= 2")
    return L


def minimal_filling(n: int, a: int) -> tuple[RatPolygon, tuple[int, ...]]:
    """Minimal resolution of ``pi(n, a)`` and its chain of self-intersections."""
    L = _canonical(n, a)
    poly, chain, _ = minimal_resolution(wedge_polygon(L.n, L.a), 0)
    return poly, tuple(chain)


# ---------------------------------------------------------------------------
# Toric surfaces from zero continued fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ToricZCF:
    """Compact toric polygon whose edges ``1..m`` carry the chain ``-z``.

    Edge 0 is the left edge, edge ``m+1`` the right edge and ``m+2`` the
    top.  ``classes[i]`` is the homology class of edge ``i`` in the basis
    ``H, E1, E2, ...`` with intersection form ``diag(1, -1, -1, ...)``.
    """

    polygon: RatPolygon
    zcf: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @property
    def chain_edges(self) -> tuple[int, ...]:
        return tuple(range(1, len(self.zcf) + 1))

    @property
    def chain(self) -> tuple[int, ...]:
        return tuple(-c for c in self.zcf)


def pair(x: Sequence[int], y: Sequence[int]) -> int:
    """Intersection pairing on ``H, E1, E2, ...``."""
    return x[0] * y[0] - sum(a * b for a, b in zip(x[1:], y[1:]))


def _extend(classes: list[list[int]]) -> None:
    for c in classes:
        c.append(0)


def zcf_to_toric(z: Sequence[int]) -> ToricZCF:
    """Replay the blow-up word of ``z`` as corner cuts on the ``[1,1]`` polygon."""
    z = tuple(int(c) for c in z)
    if not is_zcf(z) or len(z) < 2:
        raise NotZCF(f"{list(z)} is not a zero continued fraction")
    vs = [(Q(x), Q(y)) for x, y in BASE_VERTICES]
    # left, bottom, slanted, right, top
    classes = [[1, -1, 0], [0, 1, 0], [1, -1, -1], [0, 0, 1], [1, 0, -1]]
    for slot in blow_up_word(z):
        v = slot + 1
        x, prev, nxt = vs[v], vs[v - 1], vs[(v + 1) % len(vs)]
        u, w = sub(x, prev), sub(nxt, x)
        la, lb = affine_length_of(prev, x), affine_length_of(x, nxt)
        s = min(la, lb) / 3
        start = add(x, scale(-s / la, u))
        end = add(x, scale(s / lb, w))
        vs[v:v + 1] = [start, end]
        _extend(classes)
        k = len(classes[0]) - 1
        classes[slot][k] -= 1
        classes[slot + 1][k] -= 1
        exc = [0] * (k + 1)
        exc[k] = 1
        classes.insert(slot + 1, exc)
    poly = RatPolygon(tuple(vs))
    return ToricZCF(poly, z, tuple(tuple(c) for c in classes))


# ---------------------------------------------------------------------------
# The catalog
# ---------------------------------------------------------------------------

@dataclass
class Filling:
    lens: LensSpace
    zcf: tuple[int, ...]
    diagram: ATBD
    chain: tuple[int, ...]
    chain_edges: tuple[tuple[int, ...], ...]
    classes: tuple[tuple[int, ...], ...]
    skeleton: CWComplex
    invariants: InvariantReport
    lattice_h1: Group
    notch_sizes: tuple[Fraction, ...] = field(default=())

    @property
    def b2(self) -> int:
        return self.invariants.H2.rank

    def to_json(self) -> dict:
        return {
            "lens": [self.lens.n, self.lens.a],
            "zcf": list(self.zcf),
            "chain": list(self.chain),
            "chain_edges": [list(e) for e in self.chain_edges],
            "diagram": self.diagram.to_json(),
            "invariants": {
                "H0": str(self.invariants.H0),
                "H1": str(self.invariants.H1),
                "H2": str(self.invariants.H2),
                "pi1": self.invariants.pi1,
                "b2": self.b2,
            },
            "skeleton": json.loads(self.skeleton.to_json()),
        }


def _notch_edge(d: ATBD, edge: int, count: int) -> tuple[ATBD, Fraction]:
    """Place ``count`` equal, evenly spaced notches on ``edge``.

    The common size is the largest dyadic fraction of ``L/(count+1)``
    that fits, then halved.  Notches go in from the far end so that the
    edge keeps its index while being subdivided.
    """
    a, b, e = d.polygon.edge(edge)
    L = affine_length_of(a, b)
    gap = L / (count + 1)

    def place(lam):
        out = d
        for j in reversed(range(count)):
            s = gap * (j + 1) - lam / 2
            out = nontoric_blowup(out, edge, add(a, scale(s, e)), lam)
        return out

    lam = gap
    for _ in range(40):
        try:
            place(lam)
            break
        except AtlasError:
            lam /= 2
    else:
        raise BadInput(f"no room for {count} notches on edge {edge}")
    lam /= 2
    return place(lam), lam


def _lattice_h1(classes: Sequence[Sequence[int]], spheres: Sequence[Sequence[int]]) -> Group:
    """First homology from the pairing of the chain spheres with all classes."""
    rank = len(classes[0])
    basis = [[int(i == k) for i in range(rank)] for k in range(rank)]
    M = [[pair(s, e) for e in basis] for s in spheres]
    free, tors = cokernel(M, len(spheres))
    return Group(free, tuple(tors))


def _build(L: LensSpace, b: tuple[int, ...], z: tuple[int, ...]) -> Filling:
    rb = tuple(reversed(b))
    T = zcf_to_toric(z)
    d = from_polygon(T.polygon)
    classes = [list(c) for c in T.classes]
    m = len(z)
    sizes = []
    # rightmost edges first keeps the indices of the earlier ones fixed
    for j in reversed(range(1, m + 1)):
        k = rb[j - 1] - z[j - 1]
        if k <= 0:
            continue
        d, lam = _notch_edge(d, j, k)
        sizes.append(lam)
        for _ in range(k):
            _extend(classes)
            classes[j][-1] -= 1
    pieces: list[list[int]] = [[] for _ in range(m + 3)]
    owner = 0
    for e in range(d.polygon.edge_count()):
        a, _, _ = d.polygon.edge(e)
        if a in T.polygon.vertices:
            owner = T.polygon.vertices.index(a)
        if d.polygon.edge(e)[2] == T.polygon.edge(owner)[2]:
            pieces[owner].append(e)
    chain_spheres = [classes[j] for j in range(1, m + 3)]
    chain = tuple(pair(c, c) for c in chain_spheres)
    expected = tuple(-c for c in rb) + (-1, 0)
    if chain != expected:
        raise InvalidDiagram(f"chain {chain} differs from {expected}")
    removed = [e for e in range(d.polygon.edge_count()) if e not in pieces[0]]
    cw = filling_skeleton(d, removed)
    inv = homology(cw)
    chain_edges = tuple(tuple(pieces[j]) for j in range(1, m + 3))
    return Filling(
        lens=L, zcf=z, diagram=d, chain=chain, chain_edges=chain_edges,
        classes=tuple(tuple(c) for c in classes), skeleton=cw, invariants=inv,
        lattice_h1=_lattice_h1(classes, chain_spheres), notch_sizes=tuple(reversed(sizes)),
    )


def chain_selfints_from_diagram(f: Filling) -> tuple[int, ...]:
    """Self-intersections of the chain spheres read off the polygon boundary.

    Each sphere is a run of collinear edges; its self-intersection is the
    toric value for the unnotched edge minus the number of notches on it.
    """
    p = f.diagram.polygon
    out = []
    for run in f.chain_edges:
        u = p.edge(run[0] - 1)[2]
        w = p.edge((run[-1] + 1) % p.edge_count())[2]
        out.append(-wedge(u, w) - (len(run) - 1))
    return tuple(out)


def lisca_fillings(n: int, a: int) -> list[Filling]:
    """All fillings of ``L(n, a)`` in lexicographic order of their ZCF."""
    L = _canonical(n, a)
    b = hj_expand(L.n, L.n - L.a)
    return [_build(L, b, z) for z in zcfs_under_caps(tuple(reversed(b)))]


def catalog_json(fillings: Sequence[Filling]) -> str:
    return json.dumps([f.to_json() for f in fillings], indent=2)


# ---------------------------------------------------------------------------
# The B_{d,p,q} fillings
# ---------------------------------------------------------------------------

def bdpq(d: int, p: int, q: int, positions: Optional[Sequence] = None) -> ATBD:
    """Generalized nodal trade on the wedge ``pi(d p^2, d p q - 1)``."""
    d, p, q = int(d), int(p), int(q)
    if d < 1 or p < 1 or gcd(p, q) != 1:
        raise BadInput(f"need d >= 1 and coprime p, q; got ({d}, {p}, {q})")
    if p == 1:
        if d == 1:
            return nodal_trade(from_polygon(wedge_polygon(1, 0)), 0, 1)
        base = from_polygon(wedge_polygon(d, d - 1))
    else:
        qq = q % p
        base = from_polygon(wedge_polygon(d * p * p, d * p * qq - 1))
    if positions is None:
        positions = list(range(1, d + 1))
    return generalized_nodal_trade(base, 0, positions)
