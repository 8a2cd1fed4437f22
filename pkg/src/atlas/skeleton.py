"""CW models of Lagrangian skeleta and their integral homology.

Two diagram shapes are supported:

* ``cylinder-with-thimbles``: the surviving toric boundary is a single
  open chain with no genuine vertex, so it sweeps out a cylinder; every
  node contributes a thimble glued along a multiple of the core circle.
* ``chain-with-vertex``: the surviving boundary is a chain of spheres and
  planes meeting at genuine vertices; thimbles are glued along latitude
  circles of the surface their cut lands on.

Thimble degrees are ``|u ^ eig|`` where ``u`` is the direction of the
boundary edge the thimble lands on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .errors import BadInput, InvalidDiagram, UnsupportedShape
from .exactlat import invariant_factors, matmul, wedge

CYLINDER = "cylinder-with-thimbles"
CHAIN = "chain-with-vertex"


@dataclass
class CWComplex:
    """A 2-dimensional CW complex.

    ``edges[k] = (tail, head)`` gives the endpoints of 1-cell ``k``;
    ``faces[j]`` maps 1-cell indices to the degree with which face ``j``
    runs over them.
    """

    n0: int
    edges: list[tuple[int, int]] = field(default_factory=list)
    faces: list[dict[int, int]] = field(default_factory=list)
    shape: Optional[str] = None
    windings: tuple[int, ...] = ()

    def __post_init__(self):
        for t, h in self.edges:
            if not (0 <= t < self.n0 and 0 <= h < self.n0):
                raise InvalidDiagram("1-cell endpoint out of range")
        for f in self.faces:
            if any(not 0 <= k < len(self.edges) for k in f):
                raise InvalidDiagram("2-cell boundary uses a missing 1-cell")

    def add_vertex(self) -> int:
        self.n0 += 1
        return self.n0 - 1

    def add_edge(self, tail: int, head: int) -> int:
        self.edges.append((tail, head))
        return len(self.edges) - 1

    def add_face(self, boundary: dict[int, int]) -> int:
        self.faces.append({k: v for k, v in boundary.items() if v})
        return len(self.faces) - 1

    def d1(self) -> list[list[int]]:
        """Boundary matrix ``C1 -> C0`` (rows 0-cells, columns 1-cells)."""
        M = [[0] * len(self.edges) for _ in range(self.n0)]
        for k, (t, h) in enumerate(self.edges):
            M[h][k] += 1
            M[t][k] -= 1
        return M

    def d2(self) -> list[list[int]]:
        """Boundary matrix ``C2 -> C1`` (rows 1-cells, columns 2-cells)."""
        M = [[0] * len(self.faces) for _ in range(len(self.edges))]
        for j, f in enumerate(self.faces):
            for k, deg in f.items():
                M[k][j] += deg
        return M

    def to_json(self) -> str:
        return json.dumps({
            "n0": self.n0,
            "edges": [list(e) for e in self.edges],
            "faces": [{str(k): v for k, v in f.items()} for f in self.faces],
            "shape": self.shape,
            "windings": list(self.windings),
        })


@dataclass(frozen=True)
class Group:
    """A finitely generated abelian group ``Z^rank + sum Z/t``."""

    rank: int
    torsion: tuple[int, ...] = ()

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.rank:
            parts.insert(0, "Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class InvariantReport:
    H0: Group
    H1: Group
    H2: Group
    pi1: Optional[str] = None


def _rank_and_torsion(M: Sequence[Sequence[int]]) -> tuple[int, tuple[int, ...]]:
    if not M or not M[0]:
        return 0, ()
    f = invariant_factors(M)
    nz = [x for x in f if x]
    return len(nz), tuple(x for x in nz if x > 1)


def boundary_squared(c: CWComplex) -> list[list[int]]:
    if not c.edges or not c.faces:
        return []
    return matmul(c.d1(), c.d2())


def homology(c: CWComplex) -> InvariantReport:
    """Integral homology from the cellular chain complex."""
    n1, n2 = len(c.edges), len(c.faces)
    r1, _ = _rank_and_torsion(c.d1())
    r2, tors2 = _rank_and_torsion(c.d2())
    H0 = Group(c.n0 - r1)
    H1 = Group(n1 - r1 - r2, tors2)
    H2 = Group(n2 - r2)
    return InvariantReport(H0, H1, H2, pi1_report(c) if c.shape else None)


def torus_complex() -> CWComplex:
    c = CWComplex(1, [(0, 0), (0, 0)])
    c.add_face({0: 0, 1: 0})
    return c


def bdpq_skeleton(d: int, p: int, q: int) -> CWComplex:
    """Circle with ``d`` discs glued on by degree-``p`` maps."""
    if d < 1 or p < 1 or gcd(p, q) != 1:
        raise BadInput(f"need d >= 1, p >= 1 and gcd(p, q) = 1; got {(d, p, q)}")
    c = CWComplex(1, [(0, 0)], shape=CYLINDER, windings=(p,) * d)
    for _ in range(d):
        c.add_face({0: p})
    return c


def cylinder_with_thimbles(degrees: Sequence[int]) -> CWComplex:
    c = CWComplex(1, [(0, 0)], shape=CYLINDER, windings=tuple(degrees))
    for w in degrees:
        c.add_face({0: w})
    return c


def _surface(c: CWComplex, closed: bool, latitudes: Sequence[int]) -> int:
    """Add a sphere (``closed``) or a plane with thimbles on latitudes.

    Returns a 0-cell of the surface, used to join it to its neighbours.
    """
    if not latitudes:
        v = c.add_vertex()
        if closed:
            c.add_face({})
        return v
    verts = [c.add_vertex() for _ in latitudes]
    lats = [c.add_edge(v, v) for v in verts]
    for a, b in zip(verts, verts[1:]):
        c.add_edge(a, b)  # meridian arcs cancel in the annuli
    c.add_face({lats[0]: 1})
    for a, b in zip(lats, lats[1:]):
        c.add_face({b: 1, a: -1})
    if closed:
        c.add_face({lats[-1]: -1})
    for lat, w in zip(lats, latitudes):
        c.add_face({lat: w})
    return verts[0]


def chain_with_vertex(surfaces: Sequence[tuple[bool, Sequence[int]]]) -> CWComplex:
    """Spheres (``True``) and planes joined in a chain at single points."""
    c = CWComplex(0, shape=CHAIN)
    prev = None
    degs = []
    for closed, lats in surfaces:
        v = _surface(c, closed, lats)
        degs.extend(lats)
        if prev is not None:
            c.add_edge(prev, v)
        prev = v
    c.windings = tuple(degs)
    return c


def pi1_report(c: CWComplex) -> str:
    """Fundamental group for the two supported shapes."""
    if c.shape == CHAIN:
        return "trivial"
    if c.shape == CYLINDER:
        g = 0
        for w in c.windings:
            g = gcd(g, abs(w))
        if g == 0:
            return "Z"
        return "trivial" if g == 1 else f"Z/{g}"
    raise UnsupportedShape(f"no fundamental group rule for shape {c.shape!r}")


# ---------------------------------------------------------------------------
# Skeleta read off from a diagram
# ---------------------------------------------------------------------------

def _vertex_after(p, e: int) -> Optional[int]:
    if p.is_compact:
        return (e + 1) % len(p.vertices)
    return e if e < len(p.vertices) else None


def _edges_at(p, v: int) -> tuple[int, int]:
    """Edges entering and leaving vertex ``v``."""
    if p.is_compact:
        return (v - 1) % p.edge_count(), v
    return v, v + 1


def _runs(d, removed: set[int]):
    """Maximal runs of surviving edges split at genuine vertices.

    Each run is ``(edge indices, starts_at_vertex, ends_at_vertex)``.
    """
    p = d.polygon
    m = p.edge_count()
    genuine = {v for v, mark in enumerate(d.marks)
               if mark.kind in ("delzant-corner", "singular-corner")}

    def closes(e):
        v = _vertex_after(p, e)
        if v is None or (e + 1) % m in removed:
            return "open"
        return "vertex" if v in genuine else None

    starts = []
    for e in range(m):
        if e in removed:
            continue
        if not p.is_compact and e == 0:
            starts.append((e, "open"))
        elif (e - 1) % m in removed:
            starts.append((e, "open"))
        elif closes((e - 1) % m) == "vertex":
            starts.append((e, "vertex"))
    if not starts and any(e not in removed for e in range(m)):
        raise UnsupportedShape("closed chain without vertices (torus boundary)")
    runs = []
    for e0, kind in starts:
        run = [e0]
        e = e0
        while closes(e) is None:
            e = (e + 1) % m
            run.append(e)
        runs.append((run, kind == "vertex", closes(e) == "vertex"))
    return runs


def _components(d, removed: set[int]) -> int:
    p = d.polygon
    m = p.edge_count()
    surviving = [e for e in range(m) if e not in removed]
    if not surviving:
        return 0
    if not removed:
        return 1
    count = 0
    for e in surviving:
        prev = (e - 1) % m
        if (not p.is_compact and e == 0) or prev in removed:
            count += 1
    return count


def _landing_edges(d, node) -> tuple[int, ...]:
    """Boundary edges where a node's cut or notch meets the boundary."""
    from . import atbd

    p = d.polygon
    if node.cut == atbd.FLANK:
        i = p.vertices.index(node.pos)
        n = len(p.vertices)
        # the notch base continues on either side of the notch
        return (_edges_at(p, (i - 1) % n)[0], _edges_at(p, (i + 1) % n)[1])
    end = atbd.cut_end(d, node)
    if end in p.vertices:
        return _edges_at(p, p.vertices.index(end))
    return ()


def _routed_edge(d, node, run_edges: Sequence[int]) -> Optional[int]:
    """A surviving edge reachable from the node by a straight, unobstructed thimble."""
    from . import atbd

    p = d.polygon
    edges = atbd._boundary_edges(p)
    cuts = atbd._cut_segments(d)
    for e in run_edges:
        a, b, u = p.edge(e)
        if a is None or b is None:
            base = a if a is not None else b
            step = u if a is not None else (-u[0], -u[1])
            targets = [(base[0] + k * step[0], base[1] + k * step[1]) for k in range(1, 9)]
        else:
            targets = [(a[0] + (b[0] - a[0]) * Fraction(k, 17), a[1] + (b[1] - a[1]) * Fraction(k, 17))
                       for k in range(1, 17)]
        for t in targets:
            if not atbd._segment_in_region(edges, node.pos, t, strict_interior=True):
                continue
            if any(key != node.line and atbd._segments_meet(node.pos, t, s0, s1)
                   for key, (s0, s1) in cuts.items()):
                continue
            return e
    return None


def filling_skeleton(d, removed_edges: Sequence[int] = ()) -> CWComplex:
    """Skeleton of an almost toric filling.

    ``removed_edges`` are boundary edges lying in the compactifying divisor;
    everything else is almost toric boundary of the filling.
    """
    removed = set(removed_edges)
    if _components(d, removed) != 1:
        raise UnsupportedShape("surviving boundary is not connected")
    runs = _runs(d, removed)
    lat: dict[int, list[int]] = {k: [] for k in range(len(runs))}
    for node in d.nodes:
        target = None
        landing = _landing_edges(d, node)
        for k, (run, _, _) in enumerate(runs):
            hit = [e for e in landing if e in run]
            if hit:
                target = (k, hit[0])
                break
        if target is None:
            for k, (run, _, _) in enumerate(runs):
                e = _routed_edge(d, node, run)
                if e is not None:
                    target = (k, e)
                    break
        if target is None:
            raise UnsupportedShape(f"no thimble path from node {node.id} to the surviving boundary")
        k, e = target
        lat[k].append(abs(wedge(d.polygon.edge(e)[2], node.eig)))
    kinds = [(s, t) for _, s, t in runs]
    if len(runs) == 1 and kinds[0] == (False, False):
        return cylinder_with_thimbles(lat[0])
    if any(k == (False, False) for k in kinds):
        raise UnsupportedShape("cylinder mixed with other surfaces")
    return chain_with_vertex([(s and t, lat[k]) for k, (_, s, t) in enumerate(runs)])
