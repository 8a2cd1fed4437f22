"""Visible Lagrangians over segments and tropical graphs.

A segment of rational slope in the base carries a Lagrangian cylinder.
Its two ends are capped off according to where they land: an edge gives
a pinwheel core, a vertex gives a Schoen-Wolfson cone (a smooth disc
only for the diagonal ray), and a node gives a thimble when the segment
runs along the eigenline.  Only the topology is computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence

from . import atbd as _atbd
from .atbd import ATBD
from .errors import (
    BadTermination,
    Degenerate,
    InteriorObstructed,
    IrrationalDirection,
    NonPositive,
    NotDelzant,
    Tangent,
    Unbalanced,
)
from .exactlat import IntMat2, Q, add, primitive, primitive_direction, scale, sub, unimodular_completion, wedge
from .polygon import normalize_corner

DISC = "disc"
PINWHEEL = "pinwheel-core"
SCHOEN_WOLFSON = "Schoen-Wolfson"
THIMBLE = "thimble"
OPEN = "open"
INVALID = "invalid"


@dataclass(frozen=True)
class Cap:
    kind: str
    data: tuple[int, ...] = ()
    note: str = ""

    @property
    def crosscaps(self) -> Optional[int]:
        """Euler-characteristic bookkeeping: ``None`` if the cap is singular."""
        if self.kind in (DISC, THIMBLE):
            return 0
        if self.kind == PINWHEEL:
            p = self.data[0]
            return 0 if p == 1 else 1 if p == 2 else None
        if self.kind == SCHOEN_WOLFSON:
            return 0 if self.data == (1, 1) else None
        return None

    @property
    def is_manifold(self) -> bool:
        return self.crosscaps is not None

    @property
    def chi(self) -> int:
        """Euler characteristic added when gluing onto a circle."""
        return 1 if self.crosscaps == 0 else 0

    def __str__(self) -> str:
        if self.kind == PINWHEEL:
            p, q = self.data
            return "disc" if p == 1 else f"({p},{q})-pinwheel core"
        if self.kind == SCHOEN_WOLFSON:
            m, n = self.data
            return "disc" if (m, n) == (1, 1) else f"({m},{n}) Schoen-Wolfson cone"
        return self.kind


@dataclass(frozen=True)
class VisibleReport:
    start: Cap
    end: Cap
    direction: tuple[int, int]
    surface: Optional[str]

    def to_json(self) -> dict:
        return {
            "caps": [str(self.start), str(self.end)],
            "direction": list(self.direction),
            "surface": self.surface,
        }


def surface_name(chi: int, crosscaps: int, boundary: int = 0) -> str:
    """Name of the compact surface with the given Euler characteristic."""
    if boundary:
        if crosscaps == 0 and chi == 1 and boundary == 1:
            return "disc"
        if crosscaps == 0 and chi == 0 and boundary == 2:
            return "cylinder"
        if crosscaps == 1 and chi == 0 and boundary == 1:
            return "Moebius strip"
        return f"surface with chi={chi}, {boundary} boundary circles"
    if crosscaps == 0:
        if chi == 2:
            return "sphere"
        if chi == 0:
            return "torus"
        return f"genus-{(2 - chi) // 2} surface"
    k = 2 - chi
    if k == 1:
        return "RP2"
    if k == 2:
        return "Klein bottle"
    return f"connected sum of {k} RP2"


def _assemble(caps: Sequence[Cap], chi0: int) -> Optional[str]:
    """Glue caps onto a surface of Euler characteristic ``chi0``."""
    if any(c.kind == INVALID for c in caps):
        return None
    closing = [c for c in caps if c.kind != OPEN]
    if any(not c.is_manifold for c in closing):
        return "non-manifold"
    chi = chi0 + sum(c.chi for c in closing)
    crosscaps = sum(c.crosscaps for c in closing)
    return surface_name(chi, crosscaps, len(caps) - len(closing))


# ---------------------------------------------------------------------------
# Local models
# ---------------------------------------------------------------------------

def _to_horizontal(e: Sequence[int]) -> IntMat2:
    """Determinant one map sending the primitive vector ``e`` to ``(1, 0)``."""
    return unimodular_completion(e).inverse()


def edge_hit_type(edge: Sequence[int], direction: Sequence) -> tuple[int, int]:
    """Pinwheel core ``(p, q)`` where a segment meets an edge.

    ``edge`` points along the boundary with the interior on its left.  The
    edge is made horizontal and the segment is oriented into the interior,
    becoming ``(m, p)`` with ``p > 0``; shearing along the edge reduces
    ``m`` modulo ``p``.
    """
    e = primitive_direction(edge)
    v = primitive_direction(direction)
    if wedge(e, v) == 0:
        raise Tangent(f"direction {v} runs along the edge {e}")
    A = _to_horizontal(e)
    m, p = A.act(v)
    if p < 0:
        m, p = -m, -p
    return p, m % p


def vertex_hit_type(corner: Sequence[Sequence[int]], direction: Sequence) -> tuple[int, int]:
    """Ray ``(m, n)`` into the standard corner from a Delzant vertex.

    ``corner`` is the pair (incoming, outgoing) of edge directions.  The
    corner is carried onto the positive quadrant with the outgoing edge
    on the first axis.
    """
    u, w = corner
    ct, A = normalize_corner(u, w)
    if not ct.is_delzant:
        raise NotDelzant(f"vertex of type {ct} is not Delzant")
    v = primitive_direction(direction)
    m, n = A.act(v)
    if m < 0 and n < 0:
        m, n = -m, -n
    if m <= 0 or n <= 0:
        raise Tangent(f"direction {v} does not point into the corner")
    return m, n


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------

def _exact(x) -> tuple[Fraction, Fraction]:
    try:
        return Q(x[0]), Q(x[1])
    except (TypeError, ValueError) as exc:
        raise IrrationalDirection(f"{x} is not an exact rational point") from exc


def _vertex_index(d: ATBD, x) -> Optional[int]:
    try:
        return d.polygon.vertices.index(x)
    except ValueError:
        return None


def _cap_at(d: ATBD, x, inward: tuple[int, int]) -> Cap:
    """Cap where a segment leaving ``x`` in direction ``inward`` begins."""
    for node in d.nodes:
        if node.pos == x:
            if wedge(node.eig, inward) == 0:
                return Cap(THIMBLE)
            return Cap(INVALID, note=f"not along the eigenline of {node.id}")
    p = d.polygon
    i = _vertex_index(d, x)
    if i is not None:
        try:
            return Cap(SCHOEN_WOLFSON, vertex_hit_type(p.incoming_outgoing(i), inward))
        except NotDelzant as exc:
            return Cap(INVALID, note=str(exc))
    for a, e, smax in _atbd._boundary_edges(p):
        if _atbd._on_edge(x, (a, e, smax)):
            return Cap(PINWHEEL, edge_hit_type(primitive_direction(e), inward))
    return Cap(OPEN)


def _check_interior(d: ATBD, a, b) -> None:
    edges = _atbd._boundary_edges(d.polygon)
    if not _atbd._segment_in_region(edges, a, b, strict_interior=True):
        raise InteriorObstructed(f"segment {a} -> {b} leaves the interior")
    r = sub(b, a)
    node_points = {n.pos for n in d.nodes}
    for pos in node_points:
        if pos in (a, b):
            continue
        if wedge(sub(pos, a), r) == 0 and 0 < _along(a, r, pos) < 1:
            raise InteriorObstructed(f"segment passes through the node at {pos}")
    for lo, hi in _atbd._cut_segments(d).values():
        if hi is None:
            continue
        for t in _atbd._params(a, r, Fraction(1), (lo, sub(hi, lo), 1)):
            x = add(a, scale(t, r))
            if 0 < t < 1 or x not in node_points:
                raise InteriorObstructed(f"segment meets the cut at {x}")


def _along(a, r, x) -> Fraction:
    k = 0 if r[0] != 0 else 1
    return (x[k] - a[k]) / r[k]


def classify_segment(d: ATBD, seg: Sequence) -> VisibleReport:
    """Caps and surface type of the visible Lagrangian over ``seg``."""
    a, b = _exact(seg[0]), _exact(seg[1])
    if a == b:
        raise Degenerate("segment has zero length")
    v = primitive_direction(sub(b, a))
    _check_interior(d, a, b)
    start = _cap_at(d, a, v)
    end = _cap_at(d, b, (-v[0], -v[1]))
    return VisibleReport(start, end, v, _assemble((start, end), 0))


# ---------------------------------------------------------------------------
# Tropical vertices and curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TropicalVertex:
    vectors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        vs = tuple((int(x), int(y)) for x, y in self.vectors)
        for v in vs:
            if primitive(v)[1] != 1:
                raise Degenerate(f"{v} is not primitive")
        object.__setattr__(self, "vectors", vs)

    @property
    def balanced(self) -> bool:
        return sum(v[0] for v in self.vectors) == 0 and sum(v[1] for v in self.vectors) == 0


@dataclass(frozen=True)
class DeltaReport:
    delta: int
    pairwise: int
    Delta: Optional[int] = None


def _lines(vs: Sequence[tuple[int, int]]) -> Optional[list[tuple[int, int]]]:
    """Group vectors into opposite pairs, one representative per line."""
    rest = list(vs)
    out = []
    while rest:
        v = rest.pop()
        neg = (-v[0], -v[1])
        if neg not in rest:
            return None
        rest.remove(neg)
        out.append(v)
    return out


def pairwise_delta(vs: Sequence[Sequence[int]]) -> int:
    return sum(abs(wedge(vs[i], vs[j])) for i in range(len(vs)) for j in range(i + 1, len(vs)))


def tropical_delta(v: TropicalVertex | Sequence) -> DeltaReport:
    """Double points of the Lagrangian over a vertex.

    Straight lines crossing at a point meet ``sum |v_i ^ v_j|`` times.  A
    balanced trivalent vertex with ``Delta = |v_1 ^ v_2|`` carries an
    immersed pair of pants with ``(Delta - 1)/2`` double points.
    """
    if not isinstance(v, TropicalVertex):
        v = TropicalVertex(tuple(v))
    vs = v.vectors
    if len(vs) == 3 and v.balanced:
        D = abs(wedge(vs[0], vs[1]))
        if D % 2 == 0:
            raise Unbalanced(f"balanced primitive triple with even Delta {D}")
        return DeltaReport((D - 1) // 2, pairwise_delta(vs), D)
    lines = _lines(vs)
    if lines is None:
        raise Unbalanced(f"{vs} is neither balanced trivalent nor a union of lines")
    p = pairwise_delta(lines)
    return DeltaReport(p, p)


def torus_circle_intersections(u: Sequence[int], w: Sequence[int]) -> int:
    """Brute-force count of points where two circles on ``R^2/Z^2`` meet.

    The circles have primitive directions ``u`` and ``w``; the second is
    shifted by a generic offset and lattice translates are enumerated.
    """
    det = wedge(u, w)
    if det == 0:
        return 0
    sign = 1 if det > 0 else -1
    # offset (1/7, 2/11), scaled by 77 to keep everything integral
    den, off = 77, (11, 14)
    corners = [(0, 0), u, (-w[0], -w[1]), (u[0] - w[0], u[1] - w[1])]
    xs, ys = [c[0] for c in corners], [c[1] for c in corners]
    count = 0
    # t u - s w = offset + k with t, s in [0, 1): k runs over the parallelogram's bounding box
    for kx in range(min(xs) - 1, max(xs) + 1):
        for ky in range(min(ys) - 1, max(ys) + 1):
            c = (off[0] + den * kx, off[1] + den * ky)
            t, s_ = sign * wedge(c, w), sign * wedge(c, u)
            if 0 <= t < den * abs(det) and 0 <= s_ < den * abs(det):
                count += 1
    return count


@dataclass
class TropicalGraph:
    """Vertices are named points; edges are straight segments between them."""

    vertices: Mapping[str, Sequence]
    edges: Sequence[tuple[str, str]]


@dataclass
class TropicalReport:
    surface: str
    euler_characteristic: int
    orientable: bool
    double_points: int
    embedded: bool
    caps: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "euler_characteristic": self.euler_characteristic,
            "orientable": self.orientable,
            "double_points": self.double_points,
            "embedded": self.embedded,
            "caps": dict(self.caps),
        }


def _edge_crossings(pts, edges) -> int:
    """Double points where two edges cross away from the graph vertices."""
    total = 0
    for i in range(len(edges)):
        a0, a1 = pts[edges[i][0]], pts[edges[i][1]]
        for j in range(i + 1, len(edges)):
            b0, b1 = pts[edges[j][0]], pts[edges[j][1]]
            r, s = sub(a1, a0), sub(b1, b0)
            den = wedge(r, s)
            if den == 0:
                continue
            t = wedge(sub(b0, a0), s) / den
            u = wedge(sub(b0, a0), r) / den
            if 0 < t < 1 and 0 < u < 1:
                total += abs(wedge(primitive_direction(r), primitive_direction(s)))
    return total


def tropical_curve_report(d: ATBD, graph: TropicalGraph) -> TropicalReport:
    """Topology of the tropical Lagrangian over ``graph``."""
    pts = {k: _exact(x) for k, x in graph.vertices.items()}
    edges = [tuple(e) for e in graph.edges]
    out: dict[str, list[tuple[int, int]]] = {k: [] for k in pts}
    for a, b in edges:
        if pts[a] == pts[b]:
            raise Degenerate(f"edge {a}-{b} has zero length")
        _check_interior(d, pts[a], pts[b])
        v = primitive_direction(sub(pts[b], pts[a]))
        out[a].append(v)
        out[b].append((-v[0], -v[1]))
    chi, crosscaps, doubles = 0, 0, _edge_crossings(pts, edges)
    caps: dict[str, str] = {}
    singular = False
    for k, vs in out.items():
        if not vs:
            continue
        if len(vs) == 1:
            cap = _cap_at(d, pts[k], vs[0])
            if cap.kind in (OPEN, INVALID):
                raise BadTermination(f"vertex {k} at {pts[k]} is not a valid termination")
            caps[k] = str(cap)
            if not cap.is_manifold:
                singular = True
                continue
            chi += cap.chi
            crosscaps += cap.crosscaps
            continue
        if _cap_at(d, pts[k], vs[0]).kind != OPEN:
            raise BadTermination(f"vertex {k} has valence {len(vs)} on the boundary")
        if len(vs) == 3:
            tv = TropicalVertex(tuple(vs))
            if not tv.balanced:
                raise Unbalanced(f"vertex {k}: {vs} does not sum to zero")
            chi -= 1
            doubles += tropical_delta(tv).delta
        else:
            rep = tropical_delta(vs)
            doubles += rep.delta
    if singular:
        surface = "non-manifold"
    else:
        surface = surface_name(chi, crosscaps)
    return TropicalReport(surface, chi, crosscaps == 0, doubles, doubles == 0, caps)


# ---------------------------------------------------------------------------
# Reeb flow on a toric ellipsoid boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReebReport:
    """Periods are stored as multiples of ``2 pi``."""

    rho: Fraction
    m: int
    n: int
    generic_period: Fraction
    exceptional_periods: tuple[Fraction, Fraction]
    all_closed: bool = True


def _rational_gcd(a: Fraction, b: Fraction) -> Fraction:
    den = a.denominator * b.denominator
    return Fraction(gcd(a.numerator * b.denominator, b.numerator * a.denominator), den)


def ellipsoid_reeb(a, b, c) -> ReebReport:
    """Closed orbits of the Reeb field ``c^{-1}(a d/dq1 + b d/dq2)``.

    Writing ``a = rho m`` and ``b = rho n`` with ``m, n`` coprime, every
    orbit closes with period ``2 pi c / rho`` except the two circles over
    the ends of the segment, of periods ``2 pi c/(n rho)`` and ``2 pi c/(m rho)``.
    """
    a, b, c = Q(a), Q(b), Q(c)
    if min(a, b, c) <= 0:
        raise NonPositive("a, b and c must be positive")
    rho = _rational_gcd(a, b)
    m, n = int(a / rho), int(b / rho)
    return ReebReport(rho, m, n, c / rho, (c / (n * rho), c / (m * rho)))


def contact_type_level(normal: Sequence, level) -> bool:
    """Whether ``{normal . p = level}`` is transverse to the radial Liouville field."""
    if all(Q(x) == 0 for x in normal):
        raise Degenerate("zero normal")
    return Q(level) != 0
