"""Exact rational arithmetic and integer lattice linear algebra.

Vectors are plain tuples treated as *row* vectors, and matrices act on
them from the right: ``v -> v A``.  Nothing in the package ever
left-multiplies a vector by a matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import Degenerate, NonPrimitive, ZeroVector

Rational = Fraction
IntVec2 = tuple[int, int]
RatPoint = tuple[Fraction, Fraction]


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact code paths")
    return Fraction(x)


def point(x, y) -> RatPoint:
    return (Q(x), Q(y))


def primitive(v: Sequence[int]) -> tuple[IntVec2, int]:
    """Split an integer vector as ``k * u`` with ``u`` primitive and ``k >= 1``."""
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise ZeroVector("zero vector has no primitive direction")
    k = gcd(x, y)
    return (x // k, y // k), k


def primitive_direction(v: Sequence) -> IntVec2:
    """Primitive integer vector pointing along a rational direction."""
    a, b = Q(v[0]), Q(v[1])
    den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    return primitive((int(a * den), int(b * den)))[0]


def is_primitive(v: Sequence[int]) -> bool:
    return gcd(int(v[0]), int(v[1])) == 1


def wedge(v: Sequence, w: Sequence):
    """Determinant of the matrix with rows ``v`` and ``w``."""
    return v[0] * w[1] - v[1] * w[0]


def dot(v: Sequence, w: Sequence):
    return v[0] * w[0] + v[1] * w[1]


def add(v: Sequence, w: Sequence):
    return (v[0] + w[0], v[1] + w[1])


def sub(v: Sequence, w: Sequence):
    return (v[0] - w[0], v[1] - w[1])


def scale(c, v: Sequence):
    return (c * v[0], c * v[1])


@dataclass(frozen=True)
class IntMat2:
    """Integer 2x2 matrix ``<a b; c d>`` acting on row vectors from the right."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def identity(cls) -> "IntMat2":
        return cls(1, 0, 0, 1)

    def rows(self) -> tuple[IntVec2, IntVec2]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def is_unimodular(self) -> bool:
        return self.det in (1, -1)

    def __matmul__(self, other: "IntMat2") -> "IntMat2":
        return IntMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "IntMat2":
        if not self.is_unimodular():
            raise Degenerate(f"{self} is not invertible over the integers")
        s = self.det
        return IntMat2(self.d * s, -self.b * s, -self.c * s, self.a * s)

    def power(self, k: int) -> "IntMat2":
        base = self if k >= 0 else self.inverse()
        out = IntMat2.identity()
        for _ in range(abs(k)):
            out = out @ base
        return out

    def act(self, v: Sequence):
        """Right action ``v A`` on a row vector (integer or rational)."""
        return (v[0] * self.a + v[1] * self.c, v[0] * self.b + v[1] * self.d)

    def __str__(self) -> str:
        return f"<{self.a} {self.b}; {self.c} {self.d}>"


def act(v: Sequence, A: IntMat2):
    """``v A`` for a row vector ``v``."""
    return A.act(v)


def mat_product(mats: Iterable[IntMat2]) -> IntMat2:
    out = IntMat2.identity()
    for m in mats:
        out = out @ m
    return out


@dataclass(frozen=True)
class AffineMap:
    """The integral affine map ``x -> x A + C``."""

    A: IntMat2
    C: RatPoint = (Fraction(0), Fraction(0))

    def __post_init__(self):
        if not self.A.is_unimodular():
            raise Degenerate(f"linear part {self.A} is not unimodular")
        object.__setattr__(self, "C", (Q(self.C[0]), Q(self.C[1])))

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(IntMat2.identity())

    @classmethod
    def fixing(cls, p: Sequence, A: IntMat2) -> "AffineMap":
        """The map ``x -> p + (x - p) A``, which fixes ``p``."""
        pA = A.act(p)
        return cls(A, (Q(p[0]) - pA[0], Q(p[1]) - pA[1]))

    def __call__(self, x: Sequence) -> RatPoint:
        return apply(self, x)

    def inverse(self) -> "AffineMap":
        Ai = self.A.inverse()
        c = Ai.act(self.C)
        return AffineMap(Ai, (-c[0], -c[1]))

    def linear(self, v: Sequence):
        return self.A.act(v)


def apply(T: AffineMap, x: Sequence) -> RatPoint:
    """Evaluate ``x A + C`` exactly."""
    y = T.A.act((Q(x[0]), Q(x[1])))
    return (y[0] + T.C[0], y[1] + T.C[1])


def compose(T1: AffineMap, T2: AffineMap) -> AffineMap:
    """First ``T1``, then ``T2``: ``x -> (x A1 + C1) A2 + C2``."""
    c = T2.A.act(T1.C)
    return AffineMap(T1.A @ T2.A, (c[0] + T2.C[0], c[1] + T2.C[1]))


CLOCKWISE = "clockwise"
ANTICLOCKWISE = "anticlockwise"


def monodromy(e: Sequence[int], sense: str = CLOCKWISE) -> IntMat2:
    """Affine monodromy of a focus-focus node with eigenvector ``e``.

    The clockwise matrix for ``e = (p, q)`` is ``<1-pq  -q^2; p^2  1+pq>``;
    the anticlockwise one is its inverse.  Both fix ``e``.
    """
    p, q = int(e[0]), int(e[1])
    if (p, q) == (0, 0):
        raise ZeroVector("eigenvector must be nonzero")
    if gcd(p, q) != 1:
        raise NonPrimitive(f"eigenvector {(p, q)} is not primitive")
    if sense in (CLOCKWISE, "cw"):
        return IntMat2(1 - p * q, -q * q, p * p, 1 + p * q)
    if sense in (ANTICLOCKWISE, "ccw"):
        return IntMat2(1 + p * q, q * q, -p * p, 1 - p * q)
    raise ValueError(f"unknown sense {sense!r}")


def unimodular_completion(u: Sequence[int]) -> IntMat2:
    """A matrix with determinant 1 whose first row is the primitive ``u``."""
    x, y = int(u[0]), int(u[1])
    g, s, t = ext_gcd(x, y)
    if g != 1:
        raise NonPrimitive(f"{(x, y)} is not primitive")
    # x*s + y*t = 1, so the row (-t, s) completes u to determinant 1.
    return IntMat2(x, y, -t, s)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``a s + b t = g = gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# General integer matrices
# ---------------------------------------------------------------------------

IntMat = list[list[int]]


def identity_matrix(n: int) -> IntMat:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(r) for r in zip(*A)]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form ``D = S M T`` with ``S``, ``T`` unimodular.

    The diagonal of ``D`` is nonnegative and satisfies ``d1 | d2 | ...``.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    D = [[int(x) for x in row] for row in M]
    S = identity_matrix(m)
    T = identity_matrix(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in T:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        S[dst] = [a + k * b for a, b in zip(S[dst], S[src])]

    def add_col(dst, src, k):
        for row in D:
            row[dst] += k * row[src]
        for row in T:
            row[dst] += k * row[src]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        S[i] = [-a for a in S[i]]

    for t in range(min(m, n)):
        # Pivot: smallest nonzero absolute value in the lower-right block.
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return S, D, T
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        done = False
            if not done:
                continue
            # Enforce divisibility of the remaining block by the pivot.
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            negate_row(t)
    return S, D, T


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def integer_kernel(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """A Z-basis of ``{x : M x = 0}`` (column convention), via SNF."""
    m = len(M)
    n = len(M[0]) if m else 0
    _, D, T = smith_normal_form(M)
    rank = sum(1 for i in range(min(m, n)) if D[i][i])
    return [[T[r][j] for r in range(n)] for j in range(rank, n)]


def cokernel(M: Sequence[Sequence[int]], rows: int) -> tuple[int, list[int]]:
    """``Z^rows / image(M)`` as (free rank, torsion factors > 1).

    ``M`` has ``rows`` rows; it may have zero columns.
    """
    if not M or not M[0]:
        return rows, []
    factors = invariant_factors(M)
    return rows - len(factors), [f for f in factors if f > 1]


# ---------------------------------------------------------------------------
# Symplectic bases
# ---------------------------------------------------------------------------

def _omega(Om, x, y):
    n = len(Om)
    return sum(x[i] * Om[i][j] * y[j] for i in range(n) for j in range(n))


def symplectic_basis(Om: Sequence[Sequence]) -> list[list[Fraction]]:
    """Rows ``e1..en, f1..fn`` with ``Om(ei, fj) = delta_ij`` and the rest zero.

    ``Om(x, y) = x Om y^T`` for row vectors ``x``, ``y``.
    """
    N = len(Om)
    Om = [[Q(v) for v in row] for row in Om]
    for i in range(N):
        if len(Om[i]) != N:
            raise Degenerate("form must be square")
        for j in range(N):
            if Om[i][j] != -Om[j][i]:
                raise Degenerate("form is not skew-symmetric")
    if N % 2 or _rat_det(Om) == 0:
        raise Degenerate("form is degenerate")
    pool = [[Fraction(int(i == j)) for j in range(N)] for i in range(N)]
    es, fs = [], []
    while pool:
        e = pool.pop(0)
        k = next((i for i, v in enumerate(pool) if _omega(Om, e, v) != 0), None)
        if k is None:
            raise Degenerate("form is degenerate")
        f = pool.pop(k)
        c = _omega(Om, e, f)
        f = [x / c for x in f]
        new_pool = []
        for v in pool:
            a = _omega(Om, v, f)
            b = _omega(Om, v, e)
            new_pool.append([vi - a * ei + b * fi for vi, ei, fi in zip(v, e, f)])
        pool = new_pool
        es.append(e)
        fs.append(f)
    return es + fs


def _rat_det(M: Sequence[Sequence[Fraction]]) -> Fraction:
    A = [list(r) for r in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


def rational_det(M: Sequence[Sequence]) -> Fraction:
    return _rat_det([[Q(x) for x in row] for row in M])
