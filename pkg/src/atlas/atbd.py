"""Almost toric base diagrams and the surgeries on them.

A diagram is a rational polygon decorated with base-nodes.  Each node has
a primitive eigenvector ``eig`` and a branch cut.  A ray cut runs from the
node to the boundary in the direction ``+eig`` or ``-eig``; a ``flank``
node sits at the apex of a notch cut out of an edge (the picture left by
a non-toric blow-up), and its cut is the pair of flank edges.

Crossing a cut anticlockwise around its node acts on row vectors by the
anticlockwise monodromy of ``eig``.  Diagrams are immutable; every
operation returns a new one.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence

from .contfrac import hj_eval
from .errors import (
    BadInput,
    ChainNotTType,
    Collision,
    CutObstructed,
    EigenlineExitsThroughCut,
    InvalidDiagram,
    LeavesDiagram,
    NonCompactEdge,
    NotchObstructed,
    NotDelzant,
    NotTSingularity,
    OffEigenline,
    PositionsInvalid,
    SegmentsCross,
    SegmentTooLong,
    UnTruncationFails,
)
from .exactlat import (
    AffineMap,
    IntMat2,
    IntVec2,
    Q,
    RatPoint,
    add,
    dot,
    is_primitive,
    mat_product,
    monodromy,
    primitive,
    primitive_direction,
    scale,
    sub,
    unimodular_completion,
    wedge,
)
from .polygon import (
    CornerType,
    RatPolygon,
    affine_length_of,
    edge_sphere_selfint,
    normalize_corner,
)

RAY_CUTS = ("+", "-")
FLANK = "flank"


@dataclass(frozen=True)
class BaseNode:
    id: str
    pos: RatPoint
    eig: IntVec2
    cut: str = "+"
    winding: int = 1
    group: Optional[str] = None
    # parity of mutations: which side the next mutation moves
    flipped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pos", (Q(self.pos[0]), Q(self.pos[1])))
        object.__setattr__(self, "eig", (int(self.eig[0]), int(self.eig[1])))

    @property
    def cut_direction(self) -> IntVec2:
        if self.cut == "-":
            return (-self.eig[0], -self.eig[1])
        return self.eig

    @property
    def line(self) -> str:
        """Key shared by nodes that sit on one cut line."""
        return self.group if self.group is not None else self.id

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "pos": [str(self.pos[0]), str(self.pos[1])],
            "eig": list(self.eig),
            "cut": self.cut,
            "winding": self.winding,
            "group": self.group,
            "flipped": self.flipped,
        }

    @classmethod
    def from_json(cls, d: dict) -> "BaseNode":
        return cls(
            d["id"],
            (Fraction(d["pos"][0]), Fraction(d["pos"][1])),
            tuple(d["eig"]),
            d.get("cut", "+"),
            int(d.get("winding", 1)),
            d.get("group"),
            bool(d.get("flipped", False)),
        )


@dataclass(frozen=True)
class VertexMark:
    kind: str  # delzant-corner, singular-corner, cut-corner, flank
    node: Optional[str] = None
    side: Optional[str] = None  # start, apex or end of a notch
    corner: Optional[CornerType] = None

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.node is not None:
            d["node"] = self.node
        if self.side is not None:
            d["side"] = self.side
        if self.corner is not None:
            d["corner"] = [self.corner.n, self.corner.a]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "VertexMark":
        c = d.get("corner")
        return cls(d["kind"], d.get("node"), d.get("side"),
                   CornerType(*c) if c is not None else None)


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str = ""
    location: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ATBD:
    polygon: RatPolygon
    nodes: tuple[BaseNode, ...] = ()
    marks: tuple[VertexMark, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, polygon: RatPolygon, nodes: Iterable[BaseNode] = ()) -> "ATBD":
        """Assemble a diagram and derive its vertex marks from the geometry."""
        nodes = tuple(nodes)
        d = cls(polygon, nodes, ())
        return replace(d, marks=tuple(_compute_marks(d)))

    def transform(self, T: AffineMap) -> "ATBD":
        """Image under an orientation-preserving integral affine map."""
        if T.A.det != 1:
            raise BadInput("reflections reverse the crossing convention")
        nodes = [replace(n, pos=T(n.pos), eig=T.A.act(n.eig)) for n in self.nodes]
        return ATBD.build(self.polygon.transform(T), nodes)

    def node(self, node_id: str) -> BaseNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise BadInput(f"no node with id {node_id!r}")

    def group_of(self, node_id: str) -> list[BaseNode]:
        key = self.node(node_id).line
        return [n for n in self.nodes if n.line == key]

    def fresh_id(self) -> str:
        used = {n.id for n in self.nodes}
        k = len(self.nodes) + 1
        while f"n{k}" in used:
            k += 1
        return f"n{k}"

    def to_json(self) -> dict:
        return {
            "polygon": self.polygon.to_json(),
            "nodes": [n.to_json() for n in self.nodes],
            "marks": [m.to_json() for m in self.marks],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ATBD":
        nodes = [BaseNode.from_json(n) for n in d.get("nodes", [])]
        poly = RatPolygon.from_json(d["polygon"], convex=False)
        return cls.build(_with_convexity(poly), nodes)


def from_polygon(p: RatPolygon) -> ATBD:
    return ATBD.build(p)


# ---------------------------------------------------------------------------
# Boundary geometry on possibly non-convex boundaries
# ---------------------------------------------------------------------------
# An edge is (a, d, smax): the points a + s d with 0 <= s <= smax, and
# smax None for a ray.

def _boundary_edges(p: RatPolygon) -> list:
    vs = p.vertices
    out = []
    if p.is_compact:
        for i in range(len(vs)):
            out.append((vs[i], sub(vs[(i + 1) % len(vs)], vs[i]), 1))
        return out
    out.append((vs[0], p.lead, None))
    for i in range(len(vs) - 1):
        out.append((vs[i], sub(vs[i + 1], vs[i]), 1))
    out.append((vs[-1], p.trail, None))
    return out


def _chain_edges(points: Sequence, closed: bool, lead=None, trail=None) -> list:
    out = []
    n = len(points)
    if lead is not None:
        out.append((points[0], lead, None))
    last = n if closed else n - 1
    for i in range(last):
        out.append((points[i], sub(points[(i + 1) % n], points[i]), 1))
    if trail is not None:
        out.append((points[-1], trail, None))
    return out


def _on_edge(x, e) -> bool:
    a, d, smax = e
    r = sub(x, a)
    if wedge(d, r) != 0:
        return False
    s = dot(r, d) / dot(d, d)
    return s >= 0 and (smax is None or s <= smax)


def _locate(edges, x) -> int:
    """1 inside, 0 on the boundary, -1 outside (crossing parity).

    The region is sheared by ``(x, y) -> (x, y + k x)`` until no boundary
    ray is horizontal; a horizontal test ray then leaves an unbounded
    region only if it is not inside the asymptotic cone.
    """
    x = (Q(x[0]), Q(x[1]))
    if any(_on_edge(x, e) for e in edges):
        return 0
    rays = [d for _, d, smax in edges if smax is None]
    k = 0
    while any(d[1] + k * d[0] == 0 for d in rays):
        k += 1

    def sh(v):
        return (v[0], v[1] + k * v[0])

    px, py = sh(x)
    inside = False
    for a, d, smax in edges:
        a, d = sh(a), sh(d)
        above_a = a[1] > py
        if smax is None:
            above_b = d[1] > 0
        else:
            above_b = a[1] + smax * d[1] > py
        if above_a == above_b:
            continue
        s = (py - a[1]) / d[1]
        if a[0] + s * d[0] > px:
            inside = not inside
    if rays:
        lead, trail = sh(rays[0]), sh(rays[-1])
        if wedge(trail, (1, 0)) > 0 and wedge((1, 0), lead) > 0:
            inside = not inside
    return 1 if inside else -1


def _params(p, r, tmax, e) -> list[Fraction]:
    """Parameters ``t`` in ``[0, tmax]`` where ``p + t r`` meets edge ``e``."""
    a, d, smax = e
    den = wedge(r, d)
    ap = sub(a, p)
    if den != 0:
        t = wedge(ap, d) / den
        s = wedge(ap, r) / den
        if t >= 0 and (tmax is None or t <= tmax) and s >= 0 and (smax is None or s <= smax):
            return [Q(t)]
        return []
    if wedge(ap, r) != 0:
        return []
    rr = dot(r, r)
    t0 = dot(ap, r) / rr
    dir_t = dot(d, r) / rr  # change of t per unit of s
    if smax is None:
        lo, hi = (t0, None) if dir_t > 0 else (None, t0)
    else:
        t1 = t0 + smax * dir_t
        lo, hi = min(t0, t1), max(t0, t1)
    lo = Fraction(0) if lo is None else max(lo, Fraction(0))
    if tmax is not None:
        hi = tmax if hi is None else min(hi, tmax)
    if hi is not None and lo > hi:
        return []
    return [Q(lo)] if hi is None or hi == lo else [Q(lo), Q(hi)]


def _first_hit(edges, x, d) -> Optional[tuple[Fraction, RatPoint]]:
    ts = [t for e in edges for t in _params(x, d, None, e) if t > 0]
    if not ts:
        return None
    t = min(ts)
    return t, add(x, scale(t, d))


def _segment_in_region(edges, p, q, strict_interior: bool = False) -> bool:
    """Whether segment ``pq`` stays in the closed region.

    With ``strict_interior`` its relative interior may not touch the boundary.
    """
    r = sub(q, p)
    ts = {Fraction(0), Fraction(1)}
    for e in edges:
        ts.update(_params(p, r, Fraction(1), e))
    ts = sorted(ts)
    for t0, t1 in zip(ts, ts[1:]):
        loc = _locate(edges, add(p, scale((t0 + t1) / 2, r)))
        if loc < 0 or (strict_interior and loc == 0):
            return False
    if strict_interior:
        inner = [t for t in ts if 0 < t < 1]
        if any(_locate(edges, add(p, scale(t, r))) == 0 for t in inner):
            return False
    return True


def _segments_meet(p0, p1, q0, q1) -> bool:
    return bool(_params(p0, sub(p1, p0), Fraction(1), (q0, sub(q1, q0), 1)))


def _with_convexity(p: RatPolygon) -> RatPolygon:
    n = len(p.vertices)
    convex = all(wedge(*p.incoming_outgoing(v)) > 0 for v in range(n))
    if convex:
        try:
            return RatPolygon(p.vertices, p.lead, p.trail, True)
        except InvalidDiagram:
            pass
    return RatPolygon(p.vertices, p.lead, p.trail, False)


def _make_polygon(verts: Sequence, lead=None, trail=None) -> RatPolygon:
    """Polygon from a boundary chain with straight vertices removed."""
    verts = [(Q(x), Q(y)) for x, y in verts]
    closed = lead is None
    changed = True
    while changed:
        changed = False
        n = len(verts)
        for i in range(n):
            if closed:
                if n <= 3:
                    break
                u, w = sub(verts[i], verts[i - 1]), sub(verts[(i + 1) % n], verts[i])
            else:
                if n <= 1:
                    break
                u = sub(verts[i], verts[i - 1]) if i > 0 else (-lead[0], -lead[1])
                w = sub(verts[i + 1], verts[i]) if i < n - 1 else trail
            if u == (0, 0) or w == (0, 0) or (wedge(u, w) == 0 and dot(u, w) > 0):
                del verts[i]
                changed = True
                break
    return _with_convexity(RatPolygon(tuple(verts), lead, trail, False))


# ---------------------------------------------------------------------------
# Cuts and marks
# ---------------------------------------------------------------------------

def cut_end(d: ATBD, node: BaseNode | str) -> Optional[RatPoint]:
    """Where a ray cut meets the boundary (``None`` if it never does)."""
    if isinstance(node, str):
        node = d.node(node)
    if node.cut == FLANK:
        return None
    hit = _first_hit(_boundary_edges(d.polygon), node.pos, node.cut_direction)
    return hit[1] if hit else None


def _apex_index(d: ATBD, node: BaseNode) -> Optional[int]:
    try:
        return d.polygon.vertices.index(node.pos)
    except ValueError:
        return None


def _compute_marks(d: ATBD) -> list[VertexMark]:
    p = d.polygon
    n = len(p.vertices)
    marks: list[Optional[VertexMark]] = [None] * n
    for node in d.nodes:
        if node.cut != FLANK:
            continue
        i = _apex_index(d, node)
        if i is None:
            continue
        marks[i] = VertexMark(FLANK, node.id, "apex")
        if p.is_compact or 0 < i < n - 1:
            marks[(i - 1) % n] = VertexMark(FLANK, node.id, "start")
            marks[(i + 1) % n] = VertexMark(FLANK, node.id, "end")
    for node in d.nodes:
        end = cut_end(d, node)
        if end is None or end not in p.vertices:
            continue
        i = p.vertices.index(end)
        if marks[i] is None:
            marks[i] = VertexMark("cut-corner", node.line if node.group else node.id)
    out = []
    for v in range(n):
        if marks[v] is not None:
            out.append(marks[v])
            continue
        u, w = p.incoming_outgoing(v)
        if wedge(u, w) > 0:
            ct, _ = normalize_corner(u, w)
            out.append(VertexMark("delzant-corner") if ct.n == 1
                       else VertexMark("singular-corner", corner=ct))
        else:
            out.append(VertexMark("reflex"))
    return out


def _nodes_ending_at(d: ATBD, vertex: RatPoint) -> list[BaseNode]:
    return [n for n in d.nodes if n.cut != FLANK and cut_end(d, n) == vertex]


def crossing_matrix(nodes: Sequence[BaseNode]) -> IntMat2:
    """Anticlockwise crossing matrix of the cuts of ``nodes`` (one line)."""
    return mat_product(monodromy(n.eig, "ccw") for n in nodes)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(d: ATBD) -> Validation:
    """Check the diagram invariants; report the first failure."""
    p = d.polygon
    edges = _boundary_edges(p)
    ids = [n.id for n in d.nodes]
    if len(set(ids)) != len(ids):
        return Validation(False, "duplicate node ids")
    for node in d.nodes:
        where = f"node {node.id}"
        if node.eig == (0, 0) or not is_primitive(node.eig):
            return Validation(False, f"eigenvector {node.eig} is not primitive", where)
        if node.winding < 1:
            return Validation(False, "winding must be positive", where)
        if node.cut not in RAY_CUTS + (FLANK,):
            return Validation(False, f"unknown cut {node.cut!r}", where)
        if node.cut == FLANK:
            bad = _check_flank(d, node)
            if bad:
                return Validation(False, bad, where)
            continue
        if _locate(edges, node.pos) != 1:
            return Validation(False, "node is not in the interior", where)
        end = cut_end(d, node)
        if end is None:
            return Validation(False, "cut never meets the boundary", where)
        if end not in p.vertices:
            return Validation(False, "cut ends in the interior of an edge", where)
    # nodes sharing a line agree on it
    lines: dict[str, list[BaseNode]] = {}
    for node in d.nodes:
        if node.cut != FLANK:
            lines.setdefault(node.line, []).append(node)
    for key, group in lines.items():
        e0, c0 = group[0].eig, group[0].cut_direction
        for g in group[1:]:
            if primitive(g.eig)[0] not in (e0, (-e0[0], -e0[1])) or g.cut_direction != c0 \
                    or wedge(sub(g.pos, group[0].pos), e0) != 0:
                return Validation(False, "grouped nodes must share one cut line", f"group {key}")
    # cuts are disjoint from foreign nodes and from one another
    segs = {key: _line_segment(d, group) for key, group in lines.items()}
    for key, (s0, s1) in segs.items():
        for node in d.nodes:
            if node.line == key:
                continue
            if _segments_meet(s0, s1, node.pos, node.pos):
                return Validation(False, f"cut passes through node {node.id}", f"group {key}")
        for other, (t0, t1) in segs.items():
            if other <= key:
                continue
            if _segments_meet(s0, s1, t0, t1):
                return Validation(False, f"cuts {key} and {other} meet", f"group {key}")
    # corners
    for v in range(len(p.vertices)):
        m = d.marks[v] if v < len(d.marks) else None
        u, w = p.incoming_outgoing(v)
        where = f"vertex {v} at {_fmt(p.vertices[v])}"
        if m is not None and m.kind == FLANK:
            continue
        ending = _nodes_ending_at(d, p.vertices[v])
        if ending:
            M = crossing_matrix(ending)
            if primitive_direction(M.act(u)) != w:
                return Validation(False, "edge directions do not match across the cut", where)
            continue
        if wedge(u, w) <= 0:
            return Validation(False, "boundary is not convex here", where)
    return Validation(True)


def check(d: ATBD, error=InvalidDiagram) -> ATBD:
    res = validate(d)
    if not res.ok:
        loc = f" ({res.location})" if res.location else ""
        raise error(res.reason + loc)
    return d


def _fmt(x) -> str:
    return f"({x[0]}, {x[1]})"


def _line_segment(d: ATBD, group: Sequence[BaseNode]):
    """The closed cut segment of a group: from its innermost node to the boundary."""
    end = cut_end(d, group[0])
    c = group[0].cut_direction
    far = min(group, key=lambda n: dot(n.pos, c))
    return far.pos, end


def _check_flank(d: ATBD, node: BaseNode) -> Optional[str]:
    p = d.polygon
    i = _apex_index(d, node)
    n = len(p.vertices)
    if i is None:
        return "flank node is not at a polygon vertex"
    if not p.is_compact and (i == 0 or i == n - 1):
        return "flank apex needs two finite flank edges"
    start, apex, end = p.vertices[(i - 1) % n], p.vertices[i], p.vertices[(i + 1) % n]
    a1 = primitive_direction(sub(start, apex))
    a2 = primitive_direction(sub(end, apex))
    if monodromy(node.eig, "ccw").act(a1) != a2:
        return "flank edges are not paired by the node monodromy"
    u_in, _ = p.incoming_outgoing((i - 1) % n)
    _, w_out = p.incoming_outgoing((i + 1) % n)
    if u_in != w_out or u_in != node.eig:
        return "notch base is not straight along the eigenvector"
    return None


# ---------------------------------------------------------------------------
# Nodal trades and slides
# ---------------------------------------------------------------------------

def _vertex_index(d: ATBD, v) -> int:
    if isinstance(v, int):
        if not 0 <= v < len(d.polygon.vertices):
            raise BadInput(f"vertex index {v} out of range")
        return v
    x = (Q(v[0]), Q(v[1]))
    if x not in d.polygon.vertices:
        raise BadInput(f"{_fmt(x)} is not a vertex")
    return d.polygon.vertices.index(x)


def nodal_trade(d: ATBD, v, t) -> ATBD:
    """Trade the Delzant corner ``v`` for a node at ``v + t (1,1)A_v``."""
    i = _vertex_index(d, v)
    if d.marks[i].kind != "delzant-corner":
        raise NotDelzant(f"vertex {i} is not a Delzant corner")
    t = Q(t)
    if t <= 0:
        raise CutObstructed("trade parameter must be positive")
    u, w = d.polygon.incoming_outgoing(i)
    eig = primitive_direction(sub(w, u))  # the two edges from v, summed
    x = d.polygon.vertices[i]
    node = BaseNode(d.fresh_id(), add(x, scale(t, eig)), eig, "-")
    return _finish(d, d.nodes + (node,), CutObstructed)


def t_singularity(ct: CornerType) -> Optional[tuple[int, int, int]]:
    """``(d, p, q)`` with ``(n, a) = (d p^2, d p q - 1)``, largest ``p`` first."""
    n, a = ct.n, ct.a
    for p in range(isqrt(n), 0, -1):
        if n % (p * p):
            continue
        dd = n // (p * p)
        if (a + 1) % (dd * p):
            continue
        q = ((a + 1) // (dd * p)) % p if p > 1 else 1
        if p == 1:
            if dd > 1 and (a + 1) % dd == 0:
                return dd, 1, 1
            continue
        if gcd(p, q) == 1:
            return dd, p, q
    return None


def generalized_nodal_trade(d: ATBD, v, positions: Sequence) -> ATBD:
    """Smooth a ``pi(dp^2, dpq-1)`` corner into ``d`` nodes of winding ``p``."""
    i = _vertex_index(d, v)
    u, w = d.polygon.incoming_outgoing(i)
    if wedge(u, w) <= 0:
        raise NotTSingularity(f"vertex {i} is not a convex corner")
    ct, A = normalize_corner(u, w)
    found = t_singularity(ct) if ct.n > 1 else None
    if found is None:
        raise NotTSingularity(f"{ct} is not of the form pi(dp^2, dpq-1)")
    dd, p, q = found
    ts = [Q(t) for t in positions]
    if len(ts) != dd:
        raise PositionsInvalid(f"{ct} needs {dd} node positions, got {len(ts)}")
    if any(t <= 0 for t in ts) or any(a >= b for a, b in zip(ts, ts[1:])):
        raise PositionsInvalid("positions must be positive and strictly increasing")
    eig = A.inverse().act((p, q))
    x = d.polygon.vertices[i]
    group = None
    new = []
    first = d.fresh_id()
    k = int(first[1:])
    if dd > 1:
        group = f"g{k}"
    for j, t in enumerate(ts):
        new.append(BaseNode(f"n{k + j}", add(x, scale(t, eig)), eig, "-", p, group))
    return _finish(d, d.nodes + tuple(new), PositionsInvalid)


def _finish(d: ATBD, nodes, error, polygon: Optional[RatPolygon] = None) -> ATBD:
    out = ATBD.build(polygon if polygon is not None else d.polygon, nodes)
    return check(out, error)


def nodal_slide(d: ATBD, node_id: str, to) -> ATBD:
    """Move a ray-cut node along its eigenline.

    ``to`` is either an offset ``t`` (new position ``pos + t eig``) or a point.
    """
    node = d.node(node_id)
    if node.cut == FLANK:
        raise BadInput("flank nodes slide only after conversion by mutate")
    if isinstance(to, (tuple, list)):
        target = (Q(to[0]), Q(to[1]))
        if wedge(sub(target, node.pos), node.eig) != 0:
            raise OffEigenline(f"{_fmt(target)} is not on the eigenline of {node_id}")
    else:
        target = add(node.pos, scale(Q(to), node.eig))
    edges = _boundary_edges(d.polygon)
    if _locate(edges, target) != 1 or not _segment_in_region(edges, node.pos, target, True):
        raise LeavesDiagram(f"{_fmt(target)} is not in the interior of the diagram")
    for other in d.nodes:
        if other.id == node_id:
            continue
        if other.pos == target:
            raise Collision(f"node {other.id} already sits at {_fmt(target)}")
        if other.line != node.line and _segments_meet(node.pos, target, other.pos, other.pos):
            raise Collision(f"slide passes node {other.id}")
    for key, (s0, s1) in _cut_segments(d).items():
        if key != node.line and _segments_meet(node.pos, target, s0, s1):
            raise Collision(f"slide crosses the cut of {key}")
    nodes = tuple(replace(n, pos=target) if n.id == node_id else n for n in d.nodes)
    return _finish(d, nodes, Collision)


def _cut_segments(d: ATBD) -> dict:
    lines: dict[str, list[BaseNode]] = {}
    for n in d.nodes:
        if n.cut != FLANK:
            lines.setdefault(n.line, []).append(n)
    return {k: _line_segment(d, g) for k, g in lines.items()}


# ---------------------------------------------------------------------------
# Mutation
# ---------------------------------------------------------------------------

def _insert_point(p: RatPolygon, x: RatPoint) -> tuple[list, int]:
    """Vertex chain with ``x`` inserted on the boundary; returns its index."""
    vs = list(p.vertices)
    if x in vs:
        return vs, vs.index(x)
    edges = _boundary_edges(p)
    for k, e in enumerate(edges):
        if not _on_edge(x, e):
            continue
        if p.is_compact:
            vs.insert(k + 1, x)
            return vs, k + 1
        if k == 0:
            vs.insert(0, x)
            return vs, 0
        if k == len(edges) - 1:
            vs.append(x)
            return vs, len(vs) - 1
        vs.insert(k, x)
        return vs, k
    raise InvalidDiagram(f"{_fmt(x)} is not on the boundary")


def _transport(node: BaseNode, T: AffineMap) -> BaseNode:
    return replace(node, pos=T(node.pos), eig=T.A.act(node.eig))


def _split_arcs(p: RatPolygon, a: RatPoint, b: RatPoint):
    """Split the boundary at two boundary points joined by a chord.

    Returns the vertex chain (with ``a`` and ``b`` inserted) and, for the
    arc running forward from ``a`` to ``b`` and for the one running
    forward from ``b`` to ``a``, the vertex indices strictly inside.  For
    a wedge, the arc through infinity is flagged.
    """
    tmp, _ = _insert_point(p, a)
    lead, trail = p.lead, p.trail
    q = RatPolygon(tuple(tmp), lead, trail, False)
    vs, _ = _insert_point(q, b)
    ia, ib = vs.index(a), vs.index(b)
    n = len(vs)
    if p.is_compact:
        fwd = [(ia + k) % n for k in range(1, (ib - ia) % n)]
        bwd = [(ib + k) % n for k in range(1, (ia - ib) % n)]
        return vs, (fwd, False), (bwd, False)
    lo, hi = min(ia, ib), max(ia, ib)
    inner = list(range(lo + 1, hi))
    outer = list(range(hi + 1, n)) + list(range(0, lo))
    if ia < ib:
        return vs, (inner, False), (outer, True)
    return vs, (outer, True), (inner, False)


def _arc_side(vs, arc, start: RatPoint, end: RatPoint, lead, trail, c, origin) -> int:
    """Side of the chord line (sign of wedge with ``c``) an arc leaves into."""
    idx, through_inf = arc
    pts = [vs[i] for i in idx]
    for x in pts:
        s = wedge(c, sub(x, origin))
        if s:
            return 1 if s > 0 else -1
    if through_inf:
        for r in (trail, lead):
            s = wedge(c, r)
            if s:
                return 1 if s > 0 else -1
    raise EigenlineExitsThroughCut("boundary arc runs along the eigenline")


def _region_edges(vs, arc, a, b, lead, trail):
    """Closed boundary of the piece cut off by chord ``ab`` on the given arc."""
    idx, through_inf = arc
    if not through_inf:
        pts = [a] + [vs[i] for i in idx] + [b]
        return _chain_edges(pts, closed=True)
    # arc a -> ... -> last vertex -> trail ... lead -> first vertex -> ... -> b
    ia = vs.index(a)
    tail = [vs[i] for i in idx if i > ia]
    head = [vs[i] for i in idx if i < ia]
    pts1 = [a] + tail
    pts2 = head + [b]
    edges = _chain_edges(pts1, closed=False) + [(pts1[-1], trail, None)]
    edges += [(pts2[0], lead, None)] + _chain_edges(pts2, closed=False)
    edges.append((b, sub(a, b), 1))
    return edges


def mutate(d: ATBD, node_id: str, side: Optional[str] = None) -> ATBD:
    """Change the branch cut of a node (and its group) to the opposite ray.

    The piece of the diagram on one side of the eigenline is moved by the
    monodromy fixing the eigenline.  By default the anticlockwise side of
    the cut moves; after an odd number of mutations the clockwise side
    moves instead, so mutating twice restores the diagram.  Flank nodes
    are converted to an interior node whose cut runs parallel to the
    notched edge (``side`` ``"+"`` or ``"-"`` picks the direction).
    """
    node = d.node(node_id)
    if node.cut == FLANK:
        return _mutate_flank(d, node, side or "+")
    group = d.group_of(node_id)
    c = node.cut_direction
    edges = _boundary_edges(d.polygon)
    P = cut_end(d, node)
    if P is None:
        raise InvalidDiagram(f"cut of {node_id} does not reach the boundary")
    back = (-c[0], -c[1])
    far = max(group, key=lambda n: dot(n.pos, back))
    hit = _first_hit(edges, far.pos, back)
    if hit is None:
        raise EigenlineExitsThroughCut("eigenline leaves the diagram without meeting the boundary")
    P2 = hit[1]
    moving = side
    if moving is None:
        moving = "cw" if node.flipped else "ccw"
    if moving not in ("ccw", "cw"):
        raise BadInput(f"side must be 'ccw' or 'cw', got {moving!r}")
    sign = 1 if moving == "ccw" else -1
    power = len(group)
    M = monodromy(node.eig, "cw" if moving == "ccw" else "ccw").power(power)
    T = AffineMap.fixing(node.pos, M)

    p = d.polygon
    vs, arc_ab, arc_ba = _split_arcs(p, P, P2)
    side_ab = _arc_side(vs, arc_ab, P, P2, p.lead, p.trail, c, node.pos)
    arc = arc_ab if side_ab == sign else arc_ba
    if arc is arc_ab:
        region = _region_edges(vs, arc, P, P2, p.lead, p.trail)
    else:
        region = _region_edges(vs, arc, P2, P, p.lead, p.trail)

    in_group = {n.id for n in group}
    for other in d.nodes:
        if other.id in in_group:
            continue
        if _segments_meet(P, P2, other.pos, other.pos):
            raise EigenlineExitsThroughCut(f"node {other.id} lies on the eigenline")
    for key, (s0, s1) in _cut_segments(d).items():
        if key == node.line:
            continue
        if _segments_meet(P, P2, s0, s1):
            raise EigenlineExitsThroughCut(f"eigenline meets the cut of {key}")

    new_vs = list(vs)
    idx, through_inf = arc
    for i in idx:
        new_vs[i] = T(vs[i])
    lead, trail = p.lead, p.trail
    if through_inf:
        lead, trail = T.A.act(lead), T.A.act(trail)
    nodes = []
    for other in d.nodes:
        if other.id in in_group:
            nodes.append(replace(other, cut="+" if other.cut == "-" else "-",
                                 flipped=not other.flipped))
        elif _locate(region, other.pos) == 1:
            nodes.append(_transport(other, T))
        else:
            nodes.append(other)
    poly = _make_polygon(new_vs, lead, trail)
    return _finish(d, tuple(nodes), InvalidDiagram, poly)


def _mutate_flank(d: ATBD, node: BaseNode, side: str) -> ATBD:
    p = d.polygon
    if side not in ("+", "-"):
        raise BadInput("flank conversion side must be '+' or '-'")
    i = _apex_index(d, node)
    n = len(p.vertices)
    vs = list(p.vertices)
    apex = vs[i]
    e = node.eig if side == "+" else (-node.eig[0], -node.eig[1])
    # the ray leaves the apex between the flanks; skip the apex itself
    edges = [ed for ed in _boundary_edges(p)]
    hit = _first_hit(edges, apex, e)
    if hit is None:
        raise EigenlineExitsThroughCut("eigenray never meets the boundary")
    E = hit[1]
    for key, (s0, s1) in _cut_segments(d).items():
        if _segments_meet(apex, E, s0, s1):
            raise EigenlineExitsThroughCut(f"eigenray meets the cut of {key}")
    for other in d.nodes:
        if other.id != node.id and _segments_meet(apex, E, other.pos, other.pos):
            raise EigenlineExitsThroughCut(f"node {other.id} lies on the eigenray")
    if not p.is_compact:
        raise BadInput("flank conversion is implemented for compact diagrams")
    vs, iE = _insert_point(p, E)
    n = len(vs)
    ia = vs.index(apex)
    if side == "+":
        T = AffineMap.fixing(apex, monodromy(node.eig, "cw"))
        # arc from the notch end forward to E moves onto the start flank
        arc = [(ia + k) % n for k in range(1, (iE - ia) % n)]
        region = _chain_edges([apex] + [vs[k] for k in arc] + [E], closed=True)
        drop = {ia, arc[0]}
        moved = arc[1:]
    else:
        T = AffineMap.fixing(apex, monodromy(node.eig, "ccw"))
        arc = [(iE + k) % n for k in range(1, (ia - iE) % n)]
        region = _chain_edges([E] + [vs[k] for k in arc] + [apex], closed=True)
        drop = {ia, arc[-1]}
        moved = arc[:-1]
    new_vs = list(vs)
    for k in moved:
        new_vs[k] = T(vs[k])
    new_vs = [x for k, x in enumerate(new_vs) if k not in drop]
    nodes = []
    for other in d.nodes:
        if other.id == node.id:
            nodes.append(replace(other, cut=side, flipped=False))
        elif _locate(region, other.pos) == 1:
            nodes.append(_transport(other, T))
        else:
            nodes.append(other)
    return _finish(d, tuple(nodes), InvalidDiagram, _make_polygon(new_vs))


# ---------------------------------------------------------------------------
# Non-toric blow-up and rational blow-down
# ---------------------------------------------------------------------------

def notch_normal(e: Sequence[int]) -> IntVec2:
    """Inward primitive ``n`` with ``wedge(e, n) = 1``, as perpendicular as possible."""
    B = unimodular_completion(e)
    r = B.rows()[1]
    k = round(Fraction(-dot(r, e), dot(e, e)))
    return (r[0] + k * e[0], r[1] + k * e[1])


def nontoric_blowup(d: ATBD, edge: int, x, lam) -> ATBD:
    """Cut a notch of size ``lam`` out of ``edge`` starting at ``x``."""
    p = d.polygon
    a, b, e = p.edge(edge)
    if a is None or b is None:
        raise NonCompactEdge(f"edge {edge} is unbounded")
    x = (Q(x[0]), Q(x[1]))
    lam = Q(lam)
    if lam <= 0:
        raise BadInput("notch size must be positive")
    if wedge(sub(x, a), e) != 0:
        raise BadInput(f"{_fmt(x)} is not on edge {edge}")
    s0 = affine_length_of(a, x) if x != a else Fraction(0)
    if x != a and dot(sub(x, a), e) < 0:
        s0 = -s0
    L = affine_length_of(a, b)
    if s0 <= 0 or s0 + lam >= L:
        raise SegmentTooLong(f"notch [{s0}, {s0 + lam}] does not fit in the open edge of length {L}")
    nh = notch_normal(e)
    apex = add(x, scale(lam, nh))
    y = add(x, scale(lam, e))
    edges = _boundary_edges(p)
    if _locate(edges, apex) != 1:
        raise NotchObstructed("notch apex is not interior")
    if not (_segment_in_region(edges, x, apex, True) and _segment_in_region(edges, apex, y, True)):
        raise NotchObstructed("notch meets the boundary")
    tri = _chain_edges([x, y, apex], closed=True)
    for other in d.nodes:
        if _locate(tri, other.pos) >= 0:
            raise NotchObstructed(f"node {other.id} lies in the notch")
    for key, (s0_, s1_) in _cut_segments(d).items():
        if _locate(tri, s0_) >= 0 or _locate(tri, s1_) >= 0 or any(
                _segments_meet(s0_, s1_, t0, add(t0, td)) for t0, td, _ in tri):
            raise NotchObstructed(f"cut of {key} meets the notch")
    for v in p.vertices:
        if _locate(tri, v) == 1:
            raise NotchObstructed("boundary vertex inside the notch")
    vs = list(p.vertices)
    k = edge + 1 if p.is_compact else edge
    vs[k:k] = [x, apex, y]
    node = BaseNode(d.fresh_id(), apex, e, FLANK)
    poly = RatPolygon(tuple(vs), p.lead, p.trail, False)
    return _finish(d, d.nodes + (node,), NotchObstructed, poly)


def exceptional_size(d: ATBD, node_id: str) -> Fraction:
    """Affine size ``lam`` of a notch; the exceptional sphere has area ``2 pi lam``."""
    node = d.node(node_id)
    if node.cut != FLANK:
        raise BadInput(f"node {node_id} is not a notch node")
    i = _apex_index(d, node)
    vs = d.polygon.vertices
    return affine_length_of(vs[i - 1], vs[(i + 1) % len(vs)])


def _t_type_chain(selfints: Sequence[int]) -> tuple[int, int]:
    c = [-s for s in selfints]
    if not c or any(x < 2 for x in c):
        raise ChainNotTType(f"chain {list(selfints)} is not a Wahl chain")
    val = hj_eval(c)
    n, a = val.numerator, val.denominator
    r = isqrt(n)
    if r * r != n or r < 2 or (a + 1) % r:
        raise ChainNotTType(f"chain {list(selfints)} resolves pi({n},{a}), not pi(p^2, pq-1)")
    q = (a + 1) // r
    if gcd(r, q) != 1:
        raise ChainNotTType(f"chain {list(selfints)} has non-coprime data")
    return r, q


def _line_meet(x0, u, x1, w):
    """Parameters ``(s, t)`` with ``x0 + s u = x1 + t w``."""
    den = wedge(u, w)
    if den == 0:
        return None
    r = sub(x1, x0)
    return wedge(r, w) / den, wedge(r, u) / den


def rational_blowdown(d: ATBD, chain: Sequence[int], t=None) -> ATBD:
    """Replace a chain of edges resolving ``pi(p^2, pq-1)`` by a winding-``p`` node."""
    p = d.polygon
    chain = list(chain)
    m = p.edge_count()
    for e in chain:
        a, b, _ = p.edge(e)
        if a is None or b is None:
            raise NonCompactEdge(f"edge {e} is unbounded")
    step = [(chain[k + 1] - chain[k]) % m for k in range(len(chain) - 1)]
    if any(s != 1 for s in step):
        raise BadInput("chain edges must be consecutive")
    sis = [edge_sphere_selfint(p, e) for e in chain]
    _t_type_chain(sis)
    first, last = p.edge(chain[0]), p.edge(chain[-1])
    if p.is_compact:
        prev_e, next_e = p.edge((chain[0] - 1) % m), p.edge((chain[-1] + 1) % m)
    else:
        prev_e, next_e = p.edge(chain[0] - 1), p.edge(chain[-1] + 1)
    s_pt, e_pt = first[0], last[1]
    u, w = prev_e[2], next_e[2]
    meet = _line_meet(s_pt, u, e_pt, w)
    if meet is None or meet[0] <= 0 or meet[1] >= 0 or wedge(u, w) <= 0:
        raise UnTruncationFails("neighbouring edges do not meet in a convex corner")
    X = add(s_pt, scale(meet[0], u))
    vs = list(p.vertices)
    i0, i1 = vs.index(s_pt), vs.index(e_pt)
    span = [(i0 + k) % len(vs) for k in range(((i1 - i0) % len(vs)) + 1)]
    removed = [vs[k] for k in span]
    region = _chain_edges([X] + removed, closed=True)
    for v_idx in span:
        if d.marks[v_idx].kind not in ("delzant-corner", "singular-corner"):
            raise UnTruncationFails("chain touches a cut or notch")
    for node in d.nodes:
        if _locate(region, node.pos) >= 0:
            raise UnTruncationFails(f"node {node.id} is in the way")
    n = len(vs)
    if p.is_compact:
        new_vs = [vs[(i1 + 1 + k) % n] for k in range(n - len(span))] + [X]
    else:
        new_vs = vs[:i0] + [X] + vs[i1 + 1:]
    poly = _make_polygon(new_vs, p.lead, p.trail)
    base = ATBD.build(poly, d.nodes)
    vi = poly.vertices.index(X)
    u2, w2 = poly.incoming_outgoing(vi)
    ct, A = normalize_corner(u2, w2)
    _, pp, qq = t_singularity(ct)
    if t is None:
        eig = A.inverse().act((pp, qq))
        hit = _first_hit(_boundary_edges(poly), X, eig)
        t = hit[0] / 4 if hit else Fraction(1)
    return generalized_nodal_trade(base, vi, [t])


# ---------------------------------------------------------------------------
# Monodromy and cohomology
# ---------------------------------------------------------------------------

def total_monodromy(d: ATBD, base_edge: int = 0) -> IntMat2:
    """Anticlockwise monodromy around the boundary, starting on ``base_edge``.

    For a compact diagram the loop starts in the region next to edge
    ``base_edge``; for a wedge it runs from the leading ray to the trailing
    one and ``base_edge`` is ignored.
    """
    p = d.polygon
    n = len(p.vertices)
    if p.is_compact:
        order = [(base_edge + 1 + k) % n for k in range(n)]
    else:
        order = list(range(n))
    mats = []
    for v in order:
        x = p.vertices[v]
        for node in d.nodes:
            if node.cut == FLANK and node.pos == x:
                mats.append(monodromy(node.eig, "ccw"))
        ending = _nodes_ending_at(d, x)
        if ending:
            mats.append(crossing_matrix(ending))
    return mat_product(mats)


@dataclass(frozen=True)
class SymplecticClass:
    """Disc areas (in units of ``2 pi``) and the boundary map ``R^2 -> R^{k+1}``."""

    areas: tuple[Fraction, ...]
    boundary: tuple[tuple[int, int], ...]
    exact: bool


def symplectic_class(nodes: Sequence[tuple], origin=(0, 0)) -> SymplecticClass:
    """Cohomology class of the symplectic form over a plane with nodes.

    ``nodes`` is a list of ``(position, eigenvector)``.  The area of the
    disc over the segment from ``origin`` to node ``i`` is
    ``2 pi (a_i y_i - b_i x_i)`` in coordinates centred at ``origin``.
    """
    o = (Q(origin[0]), Q(origin[1]))
    pts = [((Q(pos[0]), Q(pos[1])), (int(e[0]), int(e[1]))) for pos, e in nodes]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            pi_, pj = pts[i][0], pts[j][0]
            if pi_ == o or pj == o:
                continue
            shared = _params(o, sub(pi_, o), Fraction(1), (o, sub(pj, o), 1))
            if any(t > 0 for t in shared):
                raise SegmentsCross(f"segments to nodes {i} and {j} overlap")
    areas = [Fraction(0)]
    rows = [(0, 0)]
    for pos, (a, b) in pts:
        x, y = sub(pos, o)
        areas.append(a * y - b * x)
        rows.append((b, -a))
    exact = _in_span(rows, areas)
    return SymplecticClass(tuple(areas), tuple(rows), exact)


def _in_span(rows, z) -> bool:
    """Whether ``z = rows @ (v, w)`` has a rational solution."""
    def rank(mat):
        m = [list(map(Fraction, r)) for r in mat]
        rk = 0
        cols = len(m[0]) if m else 0
        for c in range(cols):
            piv = next((r for r in range(rk, len(m)) if m[r][c] != 0), None)
            if piv is None:
                continue
            m[rk], m[piv] = m[piv], m[rk]
            for r in range(len(m)):
                if r != rk and m[r][c] != 0:
                    f = m[r][c] / m[rk][c]
                    m[r] = [x - f * y for x, y in zip(m[r], m[rk])]
            rk += 1
        return rk
    return rank(rows) == rank([list(r) + [v] for r, v in zip(rows, z)])
