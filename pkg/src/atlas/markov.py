"""Markov triples and the mutation calculus of Vianna triangles.

Corner ``P_k`` of a Vianna triangle is modelled on ``pi(d_k p_k^2,
d_k p_k q_k - 1)`` and ``l_k`` is the affine length of the edge opposite
it.  Indices are taken cyclically, so ``k + 1`` and ``k + 2`` are the
other two corners.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from . import atbd
from .atbd import ATBD, from_polygon, nodal_slide, nodal_trade
from .contfrac import QuadraticSurd, squarefree_decompose
from .errors import AtlasError, BadInput, IrrationalLengths, NonIntegralMutation, NotMarkov
from .exactlat import IntMat2, Q, add, scale, sub
from .polygon import RatPolygon, corner_type

MarkovTriple = tuple[int, int, int]


def is_markov(a: int, b: int, c: int) -> bool:
    if min(a, b, c) <= 0:
        return False
    return a * a + b * b + c * c == 3 * a * b * c


def _require(t: Sequence[int]) -> MarkovTriple:
    t = tuple(int(x) for x in t)
    if len(t) != 3 or not is_markov(*t):
        raise NotMarkov(f"{t} is not a Markov triple")
    return t


def mutate(t: Sequence[int], k: int) -> MarkovTriple:
    """Replace entry ``k`` (1-based) by the other root of the Markov quadratic."""
    t = _require(t)
    if k not in (1, 2, 3):
        raise BadInput(f"index {k} must be 1, 2 or 3")
    i = k - 1
    o1, o2 = t[(i + 1) % 3], t[(i + 2) % 3]
    out = list(t)
    out[i] = 3 * o1 * o2 - t[i]
    return tuple(out)


def descend(t: Sequence[int]) -> list[tuple[int, MarkovTriple]]:
    """Mutate the unique largest entry until ``(1,1,1)``; returns ``(k, triple)`` steps."""
    t = _require(t)
    path = []
    while True:
        m = max(t)
        if t.count(m) > 1:
            break
        k = t.index(m) + 1
        t = mutate(t, k)
        path.append((k, t))
    if t != (1, 1, 1):
        raise NotMarkov(f"descent stalled at {t}")
    return path


def enumerate_triples(bound: int) -> list[MarkovTriple]:
    """Sorted Markov triples with largest entry at most ``bound``."""
    if bound < 1:
        raise BadInput("bound must be at least 1")
    seen = {(1, 1, 1)}
    queue = deque([(1, 1, 1)])
    while queue:
        t = queue.popleft()
        for k in (1, 2, 3):
            s = tuple(sorted(mutate(t, k)))
            if s[2] <= bound and s not in seen:
                seen.add(s)
                queue.append(s)
    return sorted(seen)


# short alias used by the command line
enumerate = enumerate_triples


# ---------------------------------------------------------------------------
# Vianna data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ViannaData:
    d: tuple[int, int, int]
    p: tuple[int, int, int]
    ell: tuple[QuadraticSurd, QuadraticSurd, QuadraticSurd]
    q: tuple[Optional[int], Optional[int], Optional[int]] = (None, None, None)

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        object.__setattr__(self, "ell", tuple(x if isinstance(x, QuadraticSurd) else QuadraticSurd(x)
                                              for x in self.ell))
        if min(self.d) <= 0 or min(self.p) <= 0:
            raise BadInput("d_k and p_k must be positive")

    @classmethod
    def from_constants(cls, d: Sequence[int], p: Sequence[int], K) -> "ViannaData":
        """Lengths ``l_k = p_k/(p_{k+1} p_{k+2}) sqrt(K d_k/(d_{k+1} d_{k+2}))``."""
        ell = []
        for k in range(3):
            k1, k2 = (k + 1) % 3, (k + 2) % 3
            root = QuadraticSurd.sqrt(Fraction(K) * d[k] / (d[k1] * d[k2]))
            ell.append(root * Fraction(p[k], p[k1] * p[k2]))
        return cls(tuple(d), tuple(p), tuple(ell))

    @property
    def radicand(self) -> int:
        """Square-free ``D`` with every length in ``Q(sqrt D)``."""
        ds = {x.D for x in self.ell if x.D}
        return ds.pop() if ds else 1

    def k_values(self) -> tuple[QuadraticSurd, ...]:
        """The three expressions ``l_k l_{k+1} d_{k+2} p_{k+2}^2``."""
        out = []
        for k in range(3):
            k1, k2 = (k + 1) % 3, (k + 2) % 3
            out.append(self.ell[k] * self.ell[k1] * (self.d[k2] * self.p[k2] ** 2))
        return tuple(out)

    @property
    def K(self) -> QuadraticSurd:
        return self.k_values()[0]

    @property
    def L(self) -> QuadraticSurd:
        return self.ell[0] + self.ell[1] + self.ell[2]

    def invariants_hold(self) -> bool:
        ks = self.k_values()
        return ks[0] == ks[1] == ks[2]

    def rational_lengths(self) -> tuple[Fraction, Fraction, Fraction]:
        if any(not x.is_rational() for x in self.ell):
            raise IrrationalLengths(f"lengths {self.ell} are not rational")
        return tuple(x.p for x in self.ell)


def vianna_mutate(v: ViannaData, k: int) -> ViannaData:
    """Mutation at corner ``k`` (1-based)."""
    if k not in (1, 2, 3):
        raise BadInput(f"index {k} must be 1, 2 or 3")
    i, i1, i2 = k - 1, k % 3, (k + 1) % 3
    w1 = v.d[i1] * v.p[i1] ** 2
    w2 = v.d[i2] * v.p[i2] ** 2
    total = w1 + w2
    num, den = total, v.d[i] * v.p[i]
    if num % den:
        raise NonIntegralMutation(f"p'_{k} = {num}/{den} is not an integer")
    p = list(v.p)
    p[i] = num // den
    ell = list(v.ell)
    ell[i] = v.ell[i1] + v.ell[i2]
    ell[i1] = v.ell[i] * Fraction(w1, total)
    ell[i2] = v.ell[i] * Fraction(w2, total)
    q = list(v.q)
    q[i] = None
    return ViannaData(v.d, tuple(p), tuple(ell), tuple(q))


def _base_geometry() -> ATBD:
    """``D(1,1,1)``: the simplex of edge length 3 with all three corners traded."""
    d = from_polygon(RatPolygon(((0, 3), (0, 0), (3, 0))))
    for v in ((0, 3), (0, 0), (3, 0)):
        d = nodal_trade(d, v, Fraction(1, 2))
    return d


BASE_NODES = ("n1", "n2", "n3")  # nodes at P1, P2, P3 of D(1,1,1)


def _slide_to_corners(d: ATBD, frac: Fraction) -> ATBD:
    """Put every node ``frac`` of the way from its corner along the eigenline."""
    edges = atbd._boundary_edges(d.polygon)
    for node in d.nodes:
        corner = atbd.cut_end(d, node)
        away = sub(node.pos, corner)
        hit = atbd._first_hit(edges, corner, away)
        d = nodal_slide(d, node.id, add(corner, scale(frac, sub(hit[1], corner))))
    return d


def mutate_geometry(d: ATBD, k: int) -> ATBD:
    """``atbd.mutate`` at corner ``k``, first sliding nodes towards their corners."""
    frac = Fraction(1, 4)
    last: Optional[AtlasError] = None
    for _ in range(12):
        try:
            return atbd.mutate(_slide_to_corners(d, frac), BASE_NODES[k - 1])
        except AtlasError as exc:
            last = exc
            frac /= 2
    raise last


def corner_points(d: ATBD) -> tuple:
    """Vertices ``P1, P2, P3``: the cut ends of the three nodes."""
    return tuple(atbd.cut_end(d, n) for n in BASE_NODES)


def triangle_geometry(v: ViannaData) -> ATBD:
    """The almost toric triangle realising ``v`` (``d = (1,1,1)``, ``K = L = 9``)."""
    v.rational_lengths()
    if v.d != (1, 1, 1) or v.K != 9 or v.L != 9:
        raise BadInput("triangle geometry needs d = (1,1,1) and K = L = 9")
    path = descend(v.p)
    d = _base_geometry()
    for k, _ in reversed(path):
        d = mutate_geometry(d, k)
    return d


def corner_q(d: ATBD, k: int, p: int) -> int:
    """``q_k`` from the normal form ``pi(p^2, p q - 1)`` of corner ``k``."""
    P = corner_points(d)[k - 1]
    i = d.polygon.vertices.index(P)
    ct, _ = corner_type(d.polygon, i)
    if ct.n != p * p or (ct.a + 1) % p:
        raise BadInput(f"corner {k} has type {ct}, not pi({p * p}, {p}q-1)")
    return (ct.a + 1) // p


def vianna_from_markov(p1: int, p2: int, p3: int) -> ViannaData:
    t = _require((p1, p2, p3))
    ell = tuple(Fraction(3 * t[k], t[(k + 1) % 3] * t[(k + 2) % 3]) for k in range(3))
    v = ViannaData((1, 1, 1), t, ell)
    geom = triangle_geometry(v)
    return replace(v, q=tuple(corner_q(geom, k, t[k - 1]) for k in (1, 2, 3)))


# ---------------------------------------------------------------------------
# Integral affine equivalence of polygons
# ---------------------------------------------------------------------------

def _solve_linear(e0, e1, f0, f1) -> Optional[IntMat2]:
    """Integer ``A`` with ``e0 A = f0`` and ``e1 A = f1``, if one exists."""
    det = e0[0] * e1[1] - e0[1] * e1[0]
    if det == 0:
        return None
    # rows of E^{-1} F
    inv = ((e1[1] / Q(det), -e0[1] / Q(det)), (-e1[0] / Q(det), e0[0] / Q(det)))
    a = inv[0][0] * f0[0] + inv[0][1] * f1[0]
    b = inv[0][0] * f0[1] + inv[0][1] * f1[1]
    c = inv[1][0] * f0[0] + inv[1][1] * f1[0]
    dd = inv[1][0] * f0[1] + inv[1][1] * f1[1]
    if any(Q(x).denominator != 1 for x in (a, b, c, dd)):
        return None
    A = IntMat2(int(a), int(b), int(c), int(dd))
    return A if A.is_unimodular() else None


def affinely_equivalent(P: RatPolygon, R: RatPolygon) -> bool:
    """Whether an integral affine map carries the compact polygon ``P`` onto ``R``."""
    vs, ws = list(P.vertices), list(R.vertices)
    if len(vs) != len(ws):
        return False
    n = len(vs)
    e0, e1 = sub(vs[1], vs[0]), sub(vs[2], vs[1])
    for order in (ws, ws[::-1]):
        for s in range(n):
            w = order[s:] + order[:s]
            A = _solve_linear(e0, e1, sub(w[1], w[0]), sub(w[2], w[1]))
            if A is None:
                continue
            y = A.act(vs[0])
            C = sub(w[0], y)
            if all(add(A.act(x), C) == wk for x, wk in zip(vs, w)):
                return True
    return False
