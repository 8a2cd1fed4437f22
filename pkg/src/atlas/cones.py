"""Integral affine cones and the resolution of their cone points.

The cone ``B_{M,l}`` is the sector ``W`` swept as ``lM`` turns
anticlockwise back to ``l``, with ``x`` on ``l`` glued to ``xM`` on
``lM``.  The opposite sector ``W'`` (clockwise) gives the mirror model.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .contfrac import QuadraticSurd, periodic_fixed_point
from .errors import BadInput, EigenrayDegenerate, FiniteOrderUnsupported, NotSL2, SizesTooLarge
from .exactlat import IntMat2, Q, add, is_primitive, primitive_direction, scale, sub, unimodular_completion, wedge
from .polygon import affine_length_of, resolution_direction


class ConeClass(enum.Enum):
    IDENTITY = "identity"
    FINITE_ORDER = "finite-order"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def _as_matrix(M) -> IntMat2:
    if isinstance(M, IntMat2):
        return M
    if len(M) == 4:
        return IntMat2(*(int(x) for x in M))
    return IntMat2.from_rows(M)


def classify(M) -> ConeClass:
    """Trace rule; negative traces are classified by ``|tr|``."""
    M = _as_matrix(M)
    if M.det != 1:
        raise NotSL2(f"{M} has determinant {M.det}")
    t = M.trace
    if M == IntMat2.identity():
        return ConeClass.IDENTITY
    if abs(t) < 2 or M == IntMat2(-1, 0, 0, -1):
        return ConeClass.FINITE_ORDER
    if abs(t) == 2:
        return ConeClass.PARABOLIC
    return ConeClass.HYPERBOLIC


@dataclass(frozen=True)
class AffineCone:
    M: IntMat2
    ray: tuple[int, int]
    orientation: str = "auto"  # "W", "W'" or "auto"

    def __post_init__(self):
        object.__setattr__(self, "M", _as_matrix(self.M))
        object.__setattr__(self, "ray", (int(self.ray[0]), int(self.ray[1])))
        if self.M.det != 1:
            raise NotSL2(f"{self.M} has determinant {self.M.det}")
        if not is_primitive(self.ray):
            raise BadInput(f"ray {self.ray} is not primitive")
        if self.orientation not in ("W", "W'", "auto"):
            raise BadInput("orientation must be 'W', \"W'\" or 'auto'")
        if self.M != IntMat2.identity() and is_eigenray(self.M, self.ray):
            raise EigenrayDegenerate(f"ray {self.ray} is an eigenray of {self.M}")

    @property
    def image(self) -> tuple[int, int]:
        return self.M.act(self.ray)

    def resolved_orientation(self) -> str:
        """``W`` if it subtends less than a half-turn, else ``W'``."""
        if self.orientation != "auto":
            return self.orientation
        return "W" if wedge(self.ray, self.image) < 0 else "W'"


@dataclass(frozen=True)
class Sector:
    """The closed sector swept anticlockwise from ``start`` to ``end``."""

    start: tuple
    end: tuple

    def contains(self, x: Sequence, strict: bool = True) -> bool:
        a, b = wedge(self.start, x), wedge(x, self.end)
        if wedge(self.start, self.end) > 0:
            return (a > 0 and b > 0) if strict else (a >= 0 and b >= 0)
        # reflex sector: the complement of the convex one
        return not ((a <= 0 and b <= 0) if strict else (a < 0 and b < 0))

    def image(self, A: IntMat2) -> "Sector":
        return Sector(A.act(self.start), A.act(self.end))


def wedge_domain(c: AffineCone) -> Sector:
    """The fundamental domain ``W`` (or ``W'``) as an anticlockwise sector."""
    if c.M == IntMat2.identity():
        raise EigenrayDegenerate("for the identity both wedges are the whole plane")
    img = c.image
    if wedge(c.ray, img) == 0:
        raise EigenrayDegenerate(f"ray {c.ray} is mapped to {img}, an eigenray")
    if c.resolved_orientation() == "W":
        return Sector(img, c.ray)
    return Sector(c.ray, img)


# ---------------------------------------------------------------------------
# Eigenlines
# ---------------------------------------------------------------------------

def dominant_eigenvalue(M: IntMat2) -> QuadraticSurd:
    t = M.trace
    if abs(t) <= 2:
        raise BadInput(f"{M} is not hyperbolic")
    root = QuadraticSurd.sqrt(t * t - 4)
    lam = (QuadraticSurd(t) + root) / 2 if t > 0 else (QuadraticSurd(t) - root) / 2
    return lam


def eigen_slopes(M: IntMat2) -> list:
    """Slopes ``y/x`` of the left eigenvectors ``(x, y) M = lam (x, y)``.

    Dominant first for hyperbolic ``M``; a vertical eigenline has slope ``None``.
    """
    M = _as_matrix(M)
    t = M.trace
    if abs(t) < 2:
        return []
    if abs(t) == 2:
        lams = [QuadraticSurd(Fraction(t, 2))]
    else:
        lam = dominant_eigenvalue(M)
        lams = [lam, QuadraticSurd(1) / lam]
    out = []
    for lam in lams:
        if M.c != 0:
            out.append((lam - M.a) / M.c)
        elif lam - M.d != 0:
            out.append(QuadraticSurd(M.b) / (lam - M.d))
        else:
            out.append(None)
    return out


def _side(slope, v) -> int:
    """Sign of ``wedge((1, slope), v)``, or of ``wedge((0, 1), v)`` for ``None``."""
    if slope is None:
        return -1 if v[0] > 0 else (1 if v[0] < 0 else 0)
    return (QuadraticSurd(v[1]) - slope * v[0]).sign()


def is_eigenray(M: IntMat2, v: Sequence[int]) -> bool:
    return wedge(_as_matrix(M).act(v), v) == 0


def ray_equivalent(M, l1: Sequence[int], l2: Sequence[int]) -> bool:
    """Whether ``B_{M,l1}`` and ``B_{M,l2}`` are isomorphic by the ray criteria."""
    M = _as_matrix(M)
    for v in (l1, l2):
        if M != IntMat2.identity() and is_eigenray(M, v):
            raise EigenrayDegenerate(f"{tuple(v)} is an eigenray")
    cls = classify(M)
    if cls is not ConeClass.HYPERBOLIC:
        return True
    s = eigen_slopes(M)
    sig = [_side(s[0], v) * _side(s[1], v) for v in (l1, l2)]
    return sig[0] == sig[1]


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolvedCone:
    """A resolved cone point.

    ``chain`` is one period of the boundary in the ``l = (0, 1)`` frame;
    its last point is the first one times ``matrix``.  ``cycle`` lists the
    ``b_i`` with ``v_{i-1} + v_{i+1} = b_i v_i`` for the edge vectors and
    ``self_intersections`` the curves over the compact edges.
    ``slope_frame`` turns ``matrix`` into ``slope_matrix``, the frame in
    which the dominant eigenline has slope equal to the periodic
    continued fraction of the cycle.
    """

    kind: ConeClass
    matrix: IntMat2
    frame: IntMat2
    chain: tuple
    cycle: tuple[int, ...]
    self_intersections: tuple[int, ...]
    cuts: int
    slope_frame: Optional[IntMat2]
    slope_matrix: IntMat2


def _to_vertical(v: Sequence[int]) -> IntMat2:
    """``K`` in SL(2,Z) with ``v K = (0, 1)``."""
    # v B^{-1} = (1, 0), and <0 1; -1 0> turns (1, 0) into (0, 1)
    return unimodular_completion(v).inverse() @ IntMat2(0, 1, -1, 0)


def _conj(K: IntMat2, M: IntMat2) -> IntMat2:
    return K.inverse() @ M @ K


def _split(r, u, w):
    """Positive ``(x, y)`` with ``r = x u + y w``."""
    det = wedge(u, w)
    return Fraction(wedge(r, w), det), Fraction(wedge(u, r), det)


def _edges(chain):
    m = len(chain) - 1
    return [primitive_direction(sub(chain[i + 1], chain[i])) for i in range(m)]


def resolve_cone(c: AffineCone, sizes: Optional[Sequence] = None) -> ResolvedCone:
    """Cut the cone point off and resolve until every vertex is Delzant.

    ``sizes[0]`` is the height of the first cut along ``l``; later
    entries are the parameters of the corner cuts (default: a third of
    the room available).
    """
    kind = classify(c.M)
    if kind in (ConeClass.IDENTITY, ConeClass.FINITE_ORDER):
        raise FiniteOrderUnsupported(f"{kind.value} cones are not resolved")
    if c.M.trace < 0:
        raise BadInput("negative-trace cones are not resolved")
    K = _to_vertical(c.ray)
    if c.resolved_orientation() == "W'":
        K = K @ IntMat2(-1, 0, 0, 1)
    M = _conj(K, c.M)
    img = M.act((0, 1))
    if img[0] == 0:
        raise EigenrayDegenerate(f"ray {c.ray} is an eigenray")
    if img[0] < 0:
        raise BadInput("the chosen wedge subtends more than a half-turn")
    sizes = list(sizes or [])
    h = Q(sizes.pop(0)) if sizes else Fraction(1)
    if h <= 0:
        raise SizesTooLarge("cut height must be positive")
    P = (Fraction(0), h)
    chain = [P, M.act(P)]
    Minv = M.inverse()
    cuts = 1
    if kind is ConeClass.PARABOLIC:
        e = primitive_direction(sub(chain[1], chain[0]))
        v = unimodular_completion(e).rows()[1]
        n = _coeff(sub(M.act(v), v), e)
        return ResolvedCone(kind, M, K, tuple(chain), (2,), (-n,), cuts, None,
                            _conj(_parabolic_frame(e), M))
    while True:
        m = len(chain) - 1
        edges = _edges(chain)
        bad = None
        for i in range(m):
            u = edges[i - 1] if i > 0 else Minv.act(edges[m - 1])
            w = edges[i]
            wd = wedge(u, w)
            if wd <= 0:
                raise BadInput("the first cut is not convex; is the ray in the tiled quadrant?")
            if wd > 1:
                bad = i
                break
        if bad is None:
            break
        X = chain[bad]
        if bad == 0:
            prev = Minv.act(chain[m - 1])
            u = Minv.act(edges[m - 1])
        else:
            prev, u = chain[bad - 1], edges[bad - 1]
        nxt, w = chain[bad + 1], edges[bad]
        r = resolution_direction(u, w)
        x, y = _split(r, u, w)
        room = min(affine_length_of(prev, X) / x, affine_length_of(X, nxt) / y)
        t = Q(sizes.pop(0)) if sizes else room / 3
        if t <= 0 or t >= room:
            raise SizesTooLarge(f"corner cut {t} does not fit (room {room})")
        A = sub(X, scale(t * x, u))
        B = add(X, scale(t * y, w))
        if bad == 0:
            chain = [B] + chain[1:m] + [M.act(A), M.act(B)]
        else:
            chain[bad:bad + 1] = [A, B]
        cuts += 1
    edges = _edges(chain)
    m = len(edges)
    cyc = []
    for i in range(m):
        prev = edges[i - 1] if i > 0 else Minv.act(edges[m - 1])
        nxt = edges[i + 1] if i + 1 < m else M.act(edges[0])
        cyc.append(_coeff(add(prev, nxt), edges[i]))
    # a single edge closes up into a nodal curve, which gains 2 from its node
    selfints = (2 - cyc[0],) if m == 1 else tuple(-b for b in cyc)
    R1 = IntMat2.from_rows([Minv.act(edges[m - 1]), edges[0]])
    F = R1.inverse() @ IntMat2(1, 0, 0, -1)
    return ResolvedCone(kind, M, K, tuple(chain), tuple(cyc), selfints, cuts, F, _conj(F, M))


def _coeff(v, e) -> int:
    """The integer ``k`` with ``v = k e``."""
    if wedge(v, e) != 0:
        raise BadInput(f"{v} is not a multiple of {e}")
    i = 0 if e[0] != 0 else 1
    k = Fraction(v[i]) / e[i]
    if k.denominator != 1:
        raise BadInput(f"{v} is not an integer multiple of {e}")
    return int(k)


def _parabolic_frame(e) -> IntMat2:
    """``F`` with ``e F = (1, 0)``."""
    B = unimodular_completion(e)
    return B.inverse()


def cycle_slope_check(s: Sequence[int], M) -> bool:
    """Does the periodic continued fraction of ``s`` equal the dominant slope of ``M``?

    ``M`` is the monodromy in the slope frame of :func:`resolve_cone`.
    For parabolic ``M`` the eigenline must be horizontal and ``s`` a
    single edge.
    """
    M = _as_matrix(M)
    s = tuple(int(x) for x in s)
    if not s:
        return False
    kind = classify(M)
    if kind is ConeClass.PARABOLIC:
        slopes = eigen_slopes(M)
        return len(s) == 1 and slopes[0] is not None and slopes[0] == 0
    if kind is not ConeClass.HYPERBOLIC:
        return False
    slope = eigen_slopes(M)[0]
    if slope is None:
        return False
    try:
        return periodic_fixed_point(s) == slope
    except Exception:
        return False
