"""Rational convex polygons: compact ones and wedges with two unbounded rays.

A polygon is stored as its CCW vertex chain.  Wedge-type polygons also
carry ``lead`` (the ray leaving the first vertex, traversed inwards) and
``trail`` (the ray leaving the last vertex).  Edges are indexed in
traversal order; for a wedge, edge 0 is the leading ray and the last edge
is the trailing ray.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import ceil, floor, inf
from typing import Optional, Sequence

from .errors import (
    CornerAlreadyDelzant,
    DegenerateIntersection,
    EmptyIntersection,
    InvalidDiagram,
    NonCompactEdge,
    NonIntegralPolygon,
    SizesTooLarge,
)
from .exactlat import (
    AffineMap,
    add,
    scale,
    IntMat2,
    Q,
    RatPoint,
    IntVec2,
    dot,
    integer_kernel,
    primitive,
    primitive_direction,
    sub,
    unimodular_completion,
    wedge,
)


@dataclass(frozen=True)
class HalfPlane:
    """The set ``{x : normal . x >= bound}``."""

    normal: IntVec2
    bound: Fraction

    def __post_init__(self):
        u, k = primitive(self.normal)
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "bound", Q(self.bound) / k)

    def value(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) - self.bound

    def contains(self, x: Sequence) -> bool:
        return self.value(x) >= 0


@dataclass(frozen=True)
class CornerType:
    n: int
    a: int

    @property
    def is_delzant(self) -> bool:
        return self.n == 1

    def __str__(self) -> str:
        return f"pi({self.n},{self.a})"


def rot(v: Sequence) -> tuple:
    """Quarter turn anticlockwise; the inward normal of a CCW edge."""
    return (-v[1], v[0])


@dataclass(frozen=True)
class RatPolygon:
    vertices: tuple[RatPoint, ...]
    lead: Optional[IntVec2] = None
    trail: Optional[IntVec2] = None
    convex: bool = field(default=True, compare=False)

    def __post_init__(self):
        verts = tuple((Q(x), Q(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if (self.lead is None) != (self.trail is None):
            raise InvalidDiagram("a wedge needs both a leading and a trailing ray")
        if self.lead is not None:
            object.__setattr__(self, "lead", primitive(self.lead)[0])
            object.__setattr__(self, "trail", primitive(self.trail)[0])
            if not verts:
                raise InvalidDiagram("a wedge needs at least one vertex")
        elif len(verts) < 3:
            raise InvalidDiagram("a compact polygon needs at least three vertices")
        if self.convex:
            self._check_convex()

    # -- structure --------------------------------------------------------
    @property
    def is_compact(self) -> bool:
        return self.lead is None

    def edge_count(self) -> int:
        n = len(self.vertices)
        return n if self.is_compact else n + 1

    @cached_property
    def _dirs(self) -> tuple[IntVec2, ...]:
        vs = self.vertices
        n = len(vs)
        if self.is_compact:
            return tuple(primitive_direction(sub(vs[(i + 1) % n], vs[i])) for i in range(n))
        inner = [primitive_direction(sub(vs[i], vs[i - 1])) for i in range(1, n)]
        return tuple([(-self.lead[0], -self.lead[1])] + inner + [self.trail])

    def edge(self, i: int):
        """``(start, end, direction)``; unbounded ends are ``None``."""
        vs = self.vertices
        n = len(vs)
        if self.is_compact:
            i %= n
            return vs[i], vs[(i + 1) % n], self._dirs[i]
        if i == 0:
            return None, vs[0], self._dirs[0]
        if i == n:
            return vs[-1], None, self._dirs[n]
        return vs[i - 1], vs[i], self._dirs[i]

    def edges(self):
        return [self.edge(i) for i in range(self.edge_count())]

    def directions(self) -> list[IntVec2]:
        return [self.edge(i)[2] for i in range(self.edge_count())]

    def incoming_outgoing(self, v: int) -> tuple[IntVec2, IntVec2]:
        """Primitive directions of the edges entering and leaving vertex ``v``."""
        if self.is_compact:
            return self.edge(v - 1)[2], self.edge(v)[2]
        return self.edge(v)[2], self.edge(v + 1)[2]

    def edge_index_after(self, v: int) -> int:
        """Index of the edge leaving vertex ``v``."""
        return v if self.is_compact else v + 1

    def _check_convex(self):
        for v in range(len(self.vertices)):
            u, w = self.incoming_outgoing(v)
            if wedge(u, w) <= 0:
                raise InvalidDiagram(f"polygon is not strictly convex at vertex {v}")
        if not self.is_compact and len(self.vertices) == 1 and self.lead == self.trail:
            raise InvalidDiagram("degenerate wedge")

    # -- transformations --------------------------------------------------
    def transform(self, T: AffineMap) -> "RatPolygon":
        verts = [T(v) for v in self.vertices]
        lead = trail = None
        if not self.is_compact:
            lead, trail = T.A.act(self.lead), T.A.act(self.trail)
        if T.A.det < 0:
            verts.reverse()
            if lead is not None:
                lead, trail = trail, lead
        return RatPolygon(tuple(verts), lead, trail, self.convex)

    def to_halfplanes(self) -> list[HalfPlane]:
        out = []
        for p, q, d in self.edges():
            base = p if p is not None else q
            n = rot(d)
            out.append(HalfPlane(n, dot(n, base)))
        return out

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        if not self.convex:
            raise InvalidDiagram("containment test needs a convex polygon")
        for h in self.to_halfplanes():
            val = h.value(x)
            if val < 0 or (strict and val == 0):
                return False
        return True

    def to_json(self) -> dict:
        d = {"vertices": [[str(x), str(y)] for x, y in self.vertices]}
        if not self.is_compact:
            d["lead"] = list(self.lead)
            d["trail"] = list(self.trail)
        return d

    @classmethod
    def from_json(cls, d: dict, convex: bool = True) -> "RatPolygon":
        verts = tuple((Fraction(x), Fraction(y)) for x, y in d["vertices"])
        lead = tuple(d["lead"]) if d.get("lead") is not None else None
        trail = tuple(d["trail"]) if d.get("trail") is not None else None
        return cls(verts, lead, trail, convex)


def wedge_polygon(n: int, a: int, apex=(0, 0)) -> RatPolygon:
    """The wedge ``pi(n, a)`` spanned by the rays ``(0,1)`` and ``(n,a)``."""
    return RatPolygon(((Q(apex[0]), Q(apex[1])),), (0, 1), (n, a))


# ---------------------------------------------------------------------------
# Half-plane intersection
# ---------------------------------------------------------------------------

def _line_intersection(h1: HalfPlane, h2: HalfPlane):
    (a, b), (c, d) = h1.normal, h2.normal
    det = a * d - b * c
    if det == 0:
        return None
    x = (h1.bound * d - b * h2.bound) / det
    y = (a * h2.bound - c * h1.bound) / det
    return (x, y)


def from_halfplanes(hs: Sequence[HalfPlane]) -> RatPolygon:
    """Intersect half-planes by pairwise line intersection and filtering."""
    hs = list(dict.fromkeys(hs))
    if not hs:
        raise DegenerateIntersection("no half-planes given")
    pts = []
    seen = set()
    for i in range(len(hs)):
        for j in range(i + 1, len(hs)):
            p = _line_intersection(hs[i], hs[j])
            if p is None or p in seen:
                continue
            if all(h.contains(p) for h in hs):
                seen.add(p)
                pts.append(p)
    normals = [h.normal for h in hs]
    all_parallel = all(wedge(normals[0], n) == 0 for n in normals)
    if not pts:
        if all_parallel and _strip_feasible(hs):
            raise DegenerateIntersection("unbounded strips and half-planes are unsupported")
        raise EmptyIntersection("half-planes have empty intersection")

    rays = []
    for h in hs:
        for d in (rot(h.normal), rot(rot(rot(h.normal)))):
            if all(dot(n, d) >= 0 for n in normals) and d not in rays:
                rays.append(d)
    if not rays:
        if len(pts) < 3:
            raise DegenerateIntersection("intersection is not two-dimensional")
        c = (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
        ordered = _sort_ccw(pts, c)
        ordered = _drop_collinear(ordered, closed=True)
        if len(ordered) < 3:
            raise DegenerateIntersection("intersection is not two-dimensional")
        return RatPolygon(tuple(ordered))
    if len(rays) == 1 or any(wedge(r, s) == 0 and dot(r, s) < 0 for r in rays for s in rays):
        raise DegenerateIntersection("recession cone contains a line; unsupported")
    # lead is the anticlockwise-most recession ray, trail the clockwise-most
    lead = max(rays, key=lambda r: sum(1 for s in rays if wedge(s, r) >= 0))
    trail = max(rays, key=lambda r: sum(1 for s in rays if wedge(r, s) >= 0))
    d = (lead[0] + trail[0], lead[1] + trail[1])
    ordered = sorted(pts, key=lambda p: -wedge(d, p))
    ordered = _drop_collinear(ordered, closed=False, lead=lead, trail=trail)
    return RatPolygon(tuple(ordered), lead, trail)


def _strip_feasible(hs) -> bool:
    n0 = hs[0].normal
    lo, hi = None, None
    for h in hs:
        if h.normal == n0:
            lo = h.bound if lo is None else max(lo, h.bound)
        else:
            hi = -h.bound if hi is None else min(hi, -h.bound)
    return lo is None or hi is None or lo <= hi


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _sort_ccw(pts, c):
    from functools import cmp_to_key

    def cmp(p, q):
        u, v = sub(p, c), sub(q, c)
        hu, hv = _half(u), _half(v)
        if hu != hv:
            return hu - hv
        w = wedge(u, v)
        return -1 if w > 0 else (1 if w < 0 else 0)

    return sorted(pts, key=cmp_to_key(cmp))


def _drop_collinear(pts, closed: bool, lead=None, trail=None):
    out = list(pts)
    changed = True
    while changed and len(out) > (2 if closed else 1):
        changed = False
        n = len(out)
        for i in range(n):
            if closed:
                prev, nxt = out[i - 1], out[(i + 1) % n]
                u, w = sub(out[i], prev), sub(nxt, out[i])
            else:
                u = sub(out[i], out[i - 1]) if i > 0 else (-lead[0], -lead[1])
                w = sub(out[i + 1], out[i]) if i < n - 1 else trail
            if wedge(u, w) == 0:
                del out[i]
                changed = True
                break
    return out


def _clip(p: RatPolygon, h: HalfPlane) -> Optional[RatPolygon]:
    """Clip the boundary chain against ``h``; ``None`` when the result is degenerate."""
    vs = list(p.vertices)
    s = [h.value(v) for v in vs]
    out = []

    def cross(x, sx, d, sd):
        return add(x, scale(-sx / sd, d))

    if p.is_compact:
        inL = inT = False
    else:
        sL, sT = dot(h.normal, p.lead), dot(h.normal, p.trail)
        inL = sL > 0 or (sL == 0 and s[0] >= 0)
        inT = sT > 0 or (sT == 0 and s[-1] >= 0)
        if sL != 0 and (sL > 0) != (s[0] >= 0) and s[0] != 0:
            out.append(cross(vs[0], s[0], p.lead, sL))
    n = len(vs)
    for i in range(n):
        if s[i] >= 0:
            out.append(vs[i])
        if i < n - 1 or p.is_compact:
            j = (i + 1) % n
            if (s[i] > 0 and s[j] < 0) or (s[i] < 0 and s[j] > 0):
                out.append(cross(vs[i], s[i], sub(vs[j], vs[i]), s[j] - s[i]))
    if not p.is_compact and sT != 0 and (sT > 0) != (s[-1] >= 0) and s[-1] != 0:
        out.append(cross(vs[-1], s[-1], p.trail, sT))
    out = [x for k, x in enumerate(out) if k == 0 or x != out[k - 1]]
    along = (h.normal[1], -h.normal[0])
    if inL or inT:
        lead = p.lead if inL else (-along[0], -along[1])
        trail = p.trail if inT else along
        if not out or wedge(trail, lead) <= 0:
            return None
        dirs = [(-lead[0], -lead[1])] + [sub(b, a) for a, b in zip(out, out[1:])] + [trail]
        if any(wedge(u, w) <= 0 for u, w in zip(dirs, dirs[1:])):
            return None
        return RatPolygon(tuple(out), lead, trail)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if len(out) < 3:
        return None
    m = len(out)
    if any(wedge(sub(out[k], out[k - 1]), sub(out[(k + 1) % m], out[k])) <= 0 for k in range(m)):
        return None
    return RatPolygon(tuple(out))


def truncate(p: RatPolygon, h: HalfPlane) -> RatPolygon:
    """Intersect with a half-plane: the symplectic cut at diagram level."""
    q = _clip(p, h)
    if q is not None:
        return q
    return from_halfplanes(p.to_halfplanes() + [h])


# ---------------------------------------------------------------------------
# Lengths, corners, self-intersections
# ---------------------------------------------------------------------------

def affine_length_of(p0: Sequence, p1: Sequence) -> Fraction:
    """Affine length of the rational segment ``p0 p1``."""
    d = sub(p1, p0)
    u = primitive_direction(d)
    i = 0 if u[0] != 0 else 1
    return Q(d[i]) / u[i]


def affine_length(p: RatPolygon, i: int):
    """Affine length of edge ``i``; ``math.inf`` for unbounded rays."""
    a, b, _ = p.edge(i)
    if a is None or b is None:
        return inf
    return affine_length_of(a, b)


def normalize_corner(u: Sequence[int], w: Sequence[int]) -> tuple[CornerType, IntMat2]:
    """Corner type for incoming ``u`` and outgoing ``w``, with the linear
    normalization sending ``-u`` to ``(0,1)`` and ``w`` to ``(n, a)``."""
    mu = (-u[0], -u[1])
    B = unimodular_completion(mu)
    A = B.inverse() @ IntMat2(0, 1, -1, 0)
    n, a0 = A.act(w)
    if n <= 0:
        raise InvalidDiagram("corner is not convex")
    K = IntMat2(1, -(a0 // n), 0, 1)
    A = A @ K
    n2, a = A.act(w)
    return CornerType(n2, a), A


def corner_type(p: RatPolygon, v: int) -> tuple[CornerType, AffineMap]:
    """Type ``pi(n,a)`` of vertex ``v`` and the map carrying it onto ``pi(n,a)``."""
    u, w = p.incoming_outgoing(v)
    ct, A = normalize_corner(u, w)
    x = A.act(p.vertices[v])
    return ct, AffineMap(A, (-x[0], -x[1]))


def is_delzant(p: RatPolygon) -> bool:
    return all(corner_type(p, v)[0].n == 1 for v in range(len(p.vertices)))


def edge_sphere_selfint(p: RatPolygon, i: int) -> int:
    """Self-intersection of the sphere over compact edge ``i``."""
    a, b, _ = p.edge(i)
    if a is None or b is None:
        raise NonCompactEdge(f"edge {i} is unbounded")
    n = p.edge_count()
    if p.is_compact:
        prev_d, next_d = p.edge((i - 1) % n)[2], p.edge((i + 1) % n)[2]
    else:
        prev_d, next_d = p.edge(i - 1)[2], p.edge(i + 1)[2]
    v = (-prev_d[0], -prev_d[1])
    return wedge(v, next_d)


# ---------------------------------------------------------------------------
# Minimal resolution
# ---------------------------------------------------------------------------

def resolution_direction(u: Sequence[int], w: Sequence[int]) -> IntVec2:
    """First edge direction of the minimal resolution of the corner ``(u, w)``."""
    ct, A = normalize_corner(u, w)
    n, a = ct.n, ct.a
    # in normalized coordinates the new edge is (1, k) with a - k n >= 1
    k = (a - 1) // n
    return A.inverse().act((1, k))


def _default_size(p: RatPolygon, v: int) -> Fraction:
    lens = []
    if p.is_compact:
        ins, outs = (v - 1) % p.edge_count(), v
    else:
        ins, outs = v, v + 1
    for e in (ins, outs):
        L = affine_length(p, e)
        if L != inf:
            lens.append(L)
    return (min(lens) / 4) if lens else Fraction(1)


def cut_corner(p: RatPolygon, v: int, direction: Sequence[int], size) -> tuple[RatPolygon, int]:
    """Cut vertex ``v`` by an edge with the given direction, starting on the
    incoming edge at affine distance ``size`` from ``v``.

    Returns the new polygon and the index of the new vertex at the far end
    of the cut (where the next cut of a resolution happens).
    """
    u, _ = p.incoming_outgoing(v)
    x = p.vertices[v]
    start = (x[0] - size * u[0], x[1] - size * u[1])
    normal = rot(direction)
    h = HalfPlane(normal, dot(normal, start))
    if h.contains(x):
        raise SizesTooLarge("cut direction does not separate the vertex")
    q = truncate(p, h)
    if len(q.vertices) != len(p.vertices) + 1:
        raise SizesTooLarge("cut removes more than a single corner")
    start_idx = q.vertices.index(start)
    return q, (start_idx + 1) % len(q.vertices)


def minimal_resolution(p: RatPolygon, v: int, sizes: Optional[Sequence] = None):
    """Resolve a non-Delzant vertex by iterated truncation.

    Returns the new polygon, the self-intersections of the exceptional
    chain in traversal order, and the indices of the chain edges.
    """
    ct, _ = corner_type(p, v)
    if ct.n == 1:
        raise CornerAlreadyDelzant(f"vertex {v} is already Delzant")
    cur = p
    vi = v
    first_vertex = None
    k = 0
    while True:
        u, w = cur.incoming_outgoing(vi)
        if wedge(u, w) == 1:
            break
        d = resolution_direction(u, w)
        if sizes is not None:
            if k >= len(sizes):
                raise SizesTooLarge("not enough cut sizes supplied")
            s = Q(sizes[k])
        else:
            s = _default_size(cur, vi)
        if s <= 0:
            raise SizesTooLarge("cut sizes must be positive")
        cur, vi = cut_corner(cur, vi, d, s)
        if first_vertex is None:
            first_vertex = cur.vertices[vi - 1]
        k += 1
    start = cur.vertices.index(first_vertex)
    chain_edges = [cur.edge_index_after(start + j) for j in range(k)]
    chain = [edge_sphere_selfint(cur, e) for e in chain_edges]
    return cur, chain, chain_edges


# ---------------------------------------------------------------------------
# Lattice points
# ---------------------------------------------------------------------------

def lattice_points(p: RatPolygon) -> list[IntVec2]:
    """Integer points of a compact lattice polygon in lexicographic order."""
    if not p.is_compact:
        raise NonIntegralPolygon("lattice points need a compact polygon")
    if any(c.denominator != 1 for v in p.vertices for c in v):
        raise NonIntegralPolygon("vertices must be integral")
    xs = [int(v[0]) for v in p.vertices]
    ys = [int(v[1]) for v in p.vertices]
    return [(x, y) for x in range(min(xs), max(xs) + 1)
            for y in range(min(ys), max(ys) + 1) if p.contains((x, y))]


def binomial_relations(pts: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Integer relations ``sum a_i (p_i, 1) = 0`` as a kernel basis."""
    pts = [tuple(int(c) for c in q) for q in pts]
    M = [[q[0] for q in pts], [q[1] for q in pts], [1] * len(pts)]
    out = []
    for vec in integer_kernel(M):
        lead = next(c for c in vec if c)
        out.append(tuple(c if lead > 0 else -c for c in vec))
    return out


def monomial_relation(a: Sequence[int]) -> str:
    """Render a relation as ``prod Z_i^{a_i} = prod Z_j^{-a_j}``."""
    def side(terms):
        if not terms:
            return "1"
        return "*".join(f"Z{i}" if e == 1 else f"Z{i}^{e}" for i, e in terms)
    pos = [(i, c) for i, c in enumerate(a) if c > 0]
    neg = [(i, -c) for i, c in enumerate(a) if c < 0]
    return f"{side(pos)} = {side(neg)}"
