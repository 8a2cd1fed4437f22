"""Hirzebruch-Jung continued fractions and zero continued fractions.

Sequences use the minus-sign convention::

    [c1, ..., cm] = c1 - 1/(c2 - 1/(... - 1/cm))

evaluated from the right.  Division by a suffix that evaluates to zero
produces :data:`INFINITY`, and ``x - 1/INFINITY`` is taken to be ``x``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import gcd, isqrt
from typing import Iterable, Sequence

from .errors import BadInput, NoRealFixedPoint, NotZCF

HJSeq = tuple[int, ...]


class _Infinity:
    """Marker for a continued fraction that divides by zero at its top level."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def hj_eval(seq: Sequence[int]):
    """Value of ``[c1, ..., cm]`` as a Fraction or :data:`INFINITY`."""
    seq = tuple(int(c) for c in seq)
    if not seq:
        raise BadInput("empty continued fraction")
    value: object = Fraction(seq[-1])
    for c in reversed(seq[:-1]):
        if value is INFINITY:
            value = Fraction(c)
        elif value == 0:
            value = INFINITY
        else:
            value = c - 1 / value
    return value


def hj_expand(n: int, a: int) -> HJSeq:
    """The expansion of ``n/a`` with all entries at least 2.

    Uses ``a_{k+1} = y_k a_k - a_{k-1}`` with ``y_k = ceil(a_{k-1}/a_k)``.
    """
    n, a = int(n), int(a)
    if not (n > a >= 1) or gcd(n, a) != 1:
        raise BadInput(f"need n > a >= 1 coprime, got n={n}, a={a}")
    out = []
    prev, cur = n, a
    while cur:
        y = -(-prev // cur)
        out.append(y)
        prev, cur = cur, y * cur - prev
    return tuple(out)


def is_zcf(seq: Sequence[int]) -> bool:
    """True iff the sequence evaluates to 0 and every proper tail is positive.

    Positivity of the tails ``[c_i, ..., c_m]`` (``i > 1``) rules out division
    by zero and also excludes sequences such as ``[2,1,1,1,1,2]`` that reach 0
    through a negative tail; those are not blow-ups of ``[1,1]``.
    """
    seq = tuple(int(c) for c in seq)
    if not seq or any(c <= 0 for c in seq):
        return False
    x = Fraction(seq[-1])
    for c in reversed(seq[:-1]):
        if x <= 0:
            return False
        x = c - 1 / x
    return x == 0


def _require_zcf(seq: Sequence[int]) -> HJSeq:
    seq = tuple(int(c) for c in seq)
    if not is_zcf(seq):
        raise NotZCF(f"{list(seq)} is not a zero continued fraction")
    return seq


def blow_up_at(seq: Sequence[int], i: int) -> HJSeq:
    """Insert a 1 in slot ``i`` (0..m), raising the neighbours by one."""
    s = list(seq)
    m = len(s)
    if not 0 <= i <= m:
        raise BadInput(f"slot {i} out of range for length {m}")
    if i > 0:
        s[i - 1] += 1
    if i < m:
        s[i] += 1
    s.insert(i, 1)
    return tuple(s)


def blow_down_at(seq: Sequence[int], j: int) -> HJSeq:
    """Remove the entry 1 at index ``j``, lowering its neighbours by one."""
    s = list(seq)
    if s[j] != 1:
        raise BadInput(f"entry {j} of {s} is not 1")
    del s[j]
    if j > 0:
        s[j - 1] -= 1
    if j < len(s):
        s[j] -= 1
    return tuple(s)


def zcf_blow_ups(seq: Sequence[int]) -> list[HJSeq]:
    """All one-step blow-ups of a ZCF, sorted lexicographically."""
    s = _require_zcf(seq)
    return sorted({blow_up_at(s, i) for i in range(len(s) + 1)})


def zcf_reduce_to_11(seq: Sequence[int]) -> list[tuple[int, HJSeq]]:
    """Blow-down path to ``[1, 1]``, always removing the leftmost 1.

    Each step is ``(index removed, sequence after the blow-down)``.
    """
    s = _require_zcf(seq)
    path = []
    while len(s) > 2:
        j = s.index(1)
        s = blow_down_at(s, j)
        path.append((j, s))
    return path


def blow_up_word(seq: Sequence[int]) -> list[int]:
    """Insertion slots that rebuild ``seq`` from ``[1, 1]``."""
    return [j for j, _ in reversed(zcf_reduce_to_11(seq))]


def _embeds(c: Sequence[int], caps: Sequence[int]) -> bool:
    pos = 0
    for x in c:
        while pos < len(caps) and caps[pos] < x:
            pos += 1
        if pos == len(caps):
            return False
        pos += 1
    return True


def zcfs_under_caps(caps: Sequence[int]) -> list[HJSeq]:
    """ZCFs of the same length as ``caps`` bounded by it entrywise.

    Built by blowing up from ``[1, 1]``; an intermediate ZCF is discarded
    once it cannot sit as a subsequence under the caps, since blow-ups
    only ever raise surviving entries.
    """
    caps = tuple(int(b) for b in caps)
    m = len(caps)
    if m < 2 or any(b < 1 for b in caps):
        return []
    level = {(1, 1)} if _embeds((1, 1), caps) else set()
    for _ in range(m - 2):
        nxt = set()
        for s in level:
            for i in range(len(s) + 1):
                t = blow_up_at(s, i)
                if _embeds(t, caps):
                    nxt.add(t)
        level = nxt
    return sorted(s for s in level if all(c <= b for c, b in zip(s, caps)))


# ---------------------------------------------------------------------------
# Quadratic surds
# ---------------------------------------------------------------------------

def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write ``n >= 0`` as ``k^2 * D`` with ``D`` square-free."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0, 0
    k, D = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            D *= p
        p += 1 if p == 2 else 2
    D *= rest
    return k, D


_ZERO = Fraction(0)


@total_ordering
class QuadraticSurd:
    """The real number ``p + q*sqrt(D)`` with rational ``p, q``.

    ``D`` is square-free, and ``q == 0`` forces ``D == 0``.
    """

    __slots__ = ("p", "q", "D")

    def __init__(self, p=0, q=0, D: int = 0):
        p, q, D = Fraction(p), Fraction(q), int(D)
        if D < 0:
            raise ValueError("D must be nonnegative")
        k, D = squarefree_decompose(D)
        q *= k
        if D == 1:
            p, q, D = p + q, Fraction(0), 0
        if q == 0 or D == 0:
            q, D = Fraction(0), 0
        self.p, self.q, self.D = p, q, D

    @classmethod
    def _raw(cls, p: Fraction, q: Fraction, D: int) -> "QuadraticSurd":
        """Build from Fractions with ``D`` already square-free (or 0)."""
        out = object.__new__(cls)
        if q == 0 or D == 0:
            q, D = _ZERO, 0
        out.p, out.q, out.D = p, q, D
        return out

    @classmethod
    def sqrt(cls, r) -> "QuadraticSurd":
        """Exact square root of a nonnegative rational."""
        r = Fraction(r)
        if r < 0:
            raise ValueError("negative radicand")
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(0, Fraction(1, r.denominator), r.numerator * r.denominator)

    def is_rational(self) -> bool:
        return self.D == 0

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.D)

    def _coerce(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if self.D and other.D and self.D != other.D:
                raise ValueError("surds from different quadratic fields")
            return other
        return QuadraticSurd._raw(Fraction(other), _ZERO, 0)

    def _field(self, other: "QuadraticSurd") -> int:
        return self.D or other.D

    def __add__(self, other):
        o = self._coerce(other)
        D = self._field(o)
        return QuadraticSurd._raw(self.p + o.p, self.q + o.q, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd._raw(-self.p, -self.q, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadraticSurd._raw(self.p - o.p, self.q - o.q, self._field(o))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        D = self._field(o)
        if not D:
            return QuadraticSurd._raw(self.p * o.p, _ZERO, 0)
        return QuadraticSurd._raw(self.p * o.p + self.q * o.q * D,
                                  self.p * o.q + self.q * o.p, D)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.D

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            if o.p == 0 and o.q == 0:
                raise ZeroDivisionError("division by zero surd")
            raise ZeroDivisionError("norm vanishes")
        return self * o.conjugate() * QuadraticSurd(1 / n)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sign(self) -> int:
        """Exact sign of ``p + q sqrt(D)``."""
        def sgn(x):
            return (x > 0) - (x < 0)
        sp, sq = sgn(self.p), sgn(self.q) if self.D else 0
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 D
        diff = self.p * self.p - self.q * self.q * self.D
        return sp if diff > 0 else (sq if diff < 0 else 0)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        # the representation is canonical, so equality is structural
        return self.p == o.p and self.q == o.q and self.D == o.D

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __hash__(self):
        return hash((self.p, self.q, self.D))

    def __float__(self):
        return float(self.p) + float(self.q) * (self.D ** 0.5)

    def __repr__(self):
        if not self.D:
            return f"QuadraticSurd({self.p})"
        return f"QuadraticSurd({self.p} + {self.q}*sqrt({self.D}))"

    def __str__(self):
        if not self.D:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt({self.D})"


def mobius_matrix(seq: Sequence[int]) -> tuple[int, int, int, int]:
    """Matrix of ``x -> [c1, ..., cm, x]`` acting on column vectors."""
    a, b, c, d = 1, 0, 0, 1
    for s in seq:
        # multiply on the right by [[s, -1], [1, 0]]
        a, b, c, d = a * s + b, -a, c * s + d, -c
    return a, b, c, d


def periodic_fixed_point(seq: Sequence[int]) -> QuadraticSurd:
    """Larger real solution of ``x = [c1, ..., cm, x]``."""
    seq = tuple(int(s) for s in seq)
    if not seq:
        raise BadInput("empty period")
    a, b, c, d = mobius_matrix(seq)
    # x (c x + d) = a x + b  <=>  c x^2 + (d - a) x - b = 0
    if c == 0:
        if d == a:
            raise NoRealFixedPoint("every point is fixed or none is")
        return QuadraticSurd(Fraction(b, d - a))
    disc = (d - a) ** 2 + 4 * c * b
    if disc < 0:
        raise NoRealFixedPoint(f"period {list(seq)} has no real fixed point")
    root = QuadraticSurd.sqrt(disc)
    r1 = (QuadraticSurd(a - d) + root) / (2 * c)
    r2 = (QuadraticSurd(a - d) - root) / (2 * c)
    return max(r1, r2)


def numeric_periodic_value(seq: Sequence[int], iterations: int = 200, start: float = 1e6) -> float:
    """Float evaluation of the infinite periodic continued fraction."""
    x = start
    for _ in range(iterations):
        for s in reversed(seq):
            x = s - 1 / x
    return x


def hj_to_string(seq: Iterable[int]) -> str:
    return "[" + ",".join(str(c) for c in seq) + "]"
