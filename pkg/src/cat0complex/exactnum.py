"""Exact arithmetic in the field Q(sqrt2, sqrt3) and certified comparison of
sums of square roots of its elements.

Every coordinate, squared length and angle cosine produced by the geometric
layers lives in Q(sqrt2, sqrt3), represented as a + b*sqrt2 + c*sqrt3 + d*sqrt6
with rational coefficients.  Multi-segment geodesic lengths leave the field,
so they are carried as formal sums of square roots (`RadicalSum`) and compared
through certified rational intervals, with a symbolic canonicalisation step
(square extraction and denesting) that makes equal values share a payload.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Rat = Union[int, Fraction]

DEFAULT_MAX_BITS = 256


def max_precision_bits() -> int:
    return int(os.environ.get("CAT0_MAX_PRECISION_BITS", DEFAULT_MAX_BITS))


class PrecisionExhausted(Exception):
    """A radical-sum comparison could not be decided at the precision cap.

    Callers must treat this as a hard error, never as a tie."""


def _fr(x: Rat) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# rational sqrt bounds ------------------------------------------------------


@lru_cache(maxsize=None)
def _int_sqrt_bounds(n: int, bits: int) -> tuple[Fraction, Fraction]:
    # floor(sqrt(n * 4^bits)) / 2^bits brackets sqrt(n) to 2^-bits
    scale = 1 << bits
    lo = math.isqrt(n * scale * scale)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def sqrt_bounds_fraction(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bracket of sqrt(q) for q >= 0, width <= 2^(1-bits)-ish."""
    if q < 0:
        raise ValueError("negative radicand")
    if q == 0:
        return Fraction(0), Fraction(0)
    # sqrt(p/s) = sqrt(p*s)/s
    n = q.numerator * q.denominator
    lo, hi = _int_sqrt_bounds(n, bits)
    return lo / q.denominator, hi / q.denominator


def _mul_interval(k: Fraction, iv: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    if k >= 0:
        return k * iv[0], k * iv[1]
    return k * iv[1], k * iv[0]


# the field Q(sqrt2, sqrt3) -------------------------------------------------


class QField:
    """a + b*sqrt2 + c*sqrt3 + d*sqrt6 with rational coefficients.

    Stored as four integer numerators over one positive denominator, which
    keeps arithmetic in fast machine/long integers with a single gcd
    normalisation per operation.
    """

    __slots__ = ("na", "nb", "nc", "nd", "q")

    def __init__(self, a: Rat = 0, b: Rat = 0, c: Rat = 0, d: Rat = 0):
        if (
            type(a) is int
            and type(b) is int
            and type(c) is int
            and type(d) is int
        ):
            self.na, self.nb, self.nc, self.nd, self.q = a, b, c, d, 1
            return
        fa, fb, fc, fd = _fr(a), _fr(b), _fr(c), _fr(d)
        q = math.lcm(
            fa.denominator, fb.denominator, fc.denominator, fd.denominator
        )
        na = fa.numerator * (q // fa.denominator)
        nb = fb.numerator * (q // fb.denominator)
        nc = fc.numerator * (q // fc.denominator)
        nd = fd.numerator * (q // fd.denominator)
        g = math.gcd(na, nb, nc, nd, q)
        if g > 1:
            na, nb, nc, nd, q = na // g, nb // g, nc // g, nd // g, q // g
        self.na, self.nb, self.nc, self.nd, self.q = na, nb, nc, nd, q

    @staticmethod
    def _raw(na: int, nb: int, nc: int, nd: int, q: int) -> "QField":
        if q < 0:
            na, nb, nc, nd, q = -na, -nb, -nc, -nd, -q
        g = math.gcd(na, nb, nc, nd, q)
        if g > 1:
            na, nb, nc, nd, q = na // g, nb // g, nc // g, nd // g, q // g
        x = object.__new__(QField)
        x.na, x.nb, x.nc, x.nd, x.q = na, nb, nc, nd, q
        return x

    @property
    def a(self) -> Fraction:
        return Fraction(self.na, self.q)

    @property
    def b(self) -> Fraction:
        return Fraction(self.nb, self.q)

    @property
    def c(self) -> Fraction:
        return Fraction(self.nc, self.q)

    @property
    def d(self) -> Fraction:
        return Fraction(self.nd, self.q)

    @staticmethod
    def of(a: Rat = 0, b: Rat = 0, c: Rat = 0, d: Rat = 0) -> "QField":
        return QField(a, b, c, d)

    @staticmethod
    def rational(x: Rat) -> "QField":
        return QField(x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QField):
            return NotImplemented
        return (
            self.na == other.na
            and self.nb == other.nb
            and self.nc == other.nc
            and self.nd == other.nd
            and self.q == other.q
        )

    def __hash__(self) -> int:
        return hash((self.na, self.nb, self.nc, self.nd, self.q))

    def __add__(self, other: "QField") -> "QField":
        q1, q2 = self.q, other.q
        return QField._raw(
            self.na * q2 + other.na * q1,
            self.nb * q2 + other.nb * q1,
            self.nc * q2 + other.nc * q1,
            self.nd * q2 + other.nd * q1,
            q1 * q2,
        )

    def __sub__(self, other: "QField") -> "QField":
        q1, q2 = self.q, other.q
        return QField._raw(
            self.na * q2 - other.na * q1,
            self.nb * q2 - other.nb * q1,
            self.nc * q2 - other.nc * q1,
            self.nd * q2 - other.nd * q1,
            q1 * q2,
        )

    def __neg__(self) -> "QField":
        x = object.__new__(QField)
        x.na, x.nb, x.nc, x.nd, x.q = -self.na, -self.nb, -self.nc, -self.nd, self.q
        return x

    def __mul__(self, other: "QField") -> "QField":
        a1, b1, c1, d1 = self.na, self.nb, self.nc, self.nd
        a2, b2, c2, d2 = other.na, other.nb, other.nc, other.nd
        return QField._raw(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
            self.q * other.q,
        )

    def scale(self, k: Rat) -> "QField":
        k = _fr(k)
        n = k.numerator
        return QField._raw(
            self.na * n, self.nb * n, self.nc * n, self.nd * n,
            self.q * k.denominator,
        )

    def conj_sqrt2(self) -> "QField":
        x = object.__new__(QField)
        x.na, x.nb, x.nc, x.nd, x.q = self.na, -self.nb, self.nc, -self.nd, self.q
        return x

    def conj_sqrt3(self) -> "QField":
        x = object.__new__(QField)
        x.na, x.nb, x.nc, x.nd, x.q = self.na, self.nb, -self.nc, -self.nd, self.q
        return x

    def inverse(self) -> "QField":
        if self.is_zero():
            raise ZeroDivisionError("QField inverse of zero")
        c2 = self.conj_sqrt2()
        c3 = self.conj_sqrt3()
        c23 = c2.conj_sqrt3()
        num = c2 * c3 * c23
        prod = self * num  # rational: product of all four embeddings
        return num.scale(Fraction(prod.q, prod.na))

    def __truediv__(self, other: "QField") -> "QField":
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.na == 0 and self.nb == 0 and self.nc == 0 and self.nd == 0

    def is_rational(self) -> bool:
        return self.nb == 0 and self.nc == 0 and self.nd == 0

    def sign(self) -> int:
        """Exact sign, via nested conjugate-square comparisons; never guesses."""
        na, nb, nc, nd = self.na, self.nb, self.nc, self.nd
        s = _sign_q2(na, nb)
        t = _sign_q2(nc, nd)
        if t == 0:
            return s
        if s == 0:
            return t
        if s == t:
            return s
        # x = s + t*sqrt3 with opposite signs: compare s^2 against 3 t^2
        ua = na * na + 2 * nb * nb - 3 * (nc * nc + 2 * nd * nd)
        ub = 2 * (na * nb - 3 * nc * nd)
        su = _sign_q2(ua, ub)
        # s^2 = 3 t^2 would put sqrt3 in Q(sqrt2)
        assert su != 0
        return su if s > 0 else -su

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        lo = self.a
        hi = self.a
        for coeff, rad in ((self.b, 2), (self.c, 3), (self.d, 6)):
            if coeff != 0:
                l, h = _mul_interval(coeff, _int_sqrt_bounds(rad, bits))
                lo += l
                hi += h
        return lo, hi

    def __float__(self) -> float:
        return (
            self.na
            + self.nb * math.sqrt(2)
            + self.nc * math.sqrt(3)
            + self.nd * math.sqrt(6)
        ) / self.q

    def fapprox(self) -> tuple[float, float]:
        """(float value, rigorous absolute error bound of that float)."""
        val = (
            self.na
            + self.nb * 1.4142135623730951
            + self.nc * 1.7320508075688772
            + self.nd * 2.449489742783178
        ) / self.q
        mag = (
            abs(self.na)
            + abs(self.nb) * 1.4142135623730951
            + abs(self.nc) * 1.7320508075688772
            + abs(self.nd) * 2.449489742783178
        ) / self.q
        return val, mag * 1e-14

    def __repr__(self) -> str:
        return f"QField({self.a}, {self.b}, {self.c}, {self.d})"


def _sign_q2(a, b) -> int:
    """Exact sign of a + b*sqrt2, for integer or rational a, b."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    u = a * a - 2 * b * b
    su = (u > 0) - (u < 0)
    assert su != 0  # a^2 = 2 b^2 is impossible for nonzero rationals
    return su if a > 0 else -su


QF_ZERO = QField.rational(0)
QF_ONE = QField.rational(1)
QF_HALF = QField.rational(Fraction(1, 2))
QF_SQRT2 = QField.of(0, 1)
QF_SQRT3 = QField.of(0, 0, 1)
QF_SQRT6 = QField.of(0, 0, 0, 1)


def qf_mul(x: QField, y: QField) -> QField:
    return x * y


def qf_sign(x: QField) -> int:
    return x.sign()


def qf_cmp(x: QField, y: QField) -> int:
    return (x - y).sign()


def qf_sqrt_if_exact(q: QField) -> "QField | None":
    """Return t in Q(sqrt2,sqrt3) with t^2 == q and t >= 0, if one exists."""
    if q.is_zero():
        return QF_ZERO
    if q.sign() < 0:
        return None
    t = _denest_cached(q.na, q.nb, q.nc, q.nd, q.q)
    return t


@lru_cache(maxsize=None)
def _denest_cached(na: int, nb: int, nc: int, nd: int, den: int) -> "QField | None":
    import sympy

    a, b, c, d = (Fraction(n, den) for n in (na, nb, nc, nd))
    expr = (
        sympy.Rational(a)
        + sympy.Rational(b) * sympy.sqrt(2)
        + sympy.Rational(c) * sympy.sqrt(3)
        + sympy.Rational(d) * sympy.sqrt(6)
    )
    root = sympy.sqrtdenest(sympy.sqrt(expr))
    poly = sympy.expand(root)
    coeffs = {1: sympy.Rational(0), 2: sympy.Rational(0), 3: sympy.Rational(0), 6: sympy.Rational(0)}
    for term in sympy.Add.make_args(poly):
        rat, rad = sympy.Rational(1), 1
        for f in sympy.Mul.make_args(term):
            if f.is_Rational:
                rat *= f
            elif f.is_Pow and f.exp == sympy.Rational(1, 2) and f.base.is_Integer:
                rad *= int(f.base)
            else:
                return None
        if rad not in coeffs:
            return None
        coeffs[rad] += rat
    t = QField.of(
        Fraction(int(coeffs[1].p), int(coeffs[1].q)),
        Fraction(int(coeffs[2].p), int(coeffs[2].q)),
        Fraction(int(coeffs[3].p), int(coeffs[3].q)),
        Fraction(int(coeffs[6].p), int(coeffs[6].q)),
    )
    if not (t * t - QField(a, b, c, d)).is_zero():
        return None
    return t if t.sign() >= 0 else -t


# radical sums --------------------------------------------------------------


@lru_cache(maxsize=None)
def _squarefree_split(n: int) -> tuple[int, int]:
    """n = m^2 * k with k squarefree; returns (m, k)."""
    import sympy

    m, k = 1, 1
    for p, e in sympy.factorint(n).items():
        m *= p ** (e // 2)
        if e % 2:
            k *= p
    return m, k


def _canonical_terms(coeff: Fraction, q: QField) -> list[tuple[Fraction, QField]]:
    """Normalise coeff * sqrt(q): extract rational squares, denest exact roots."""
    if coeff == 0:
        return []
    sgn = q.sign()
    if sgn < 0:
        raise ValueError("negative radicand in radical sum")
    if sgn == 0:
        return []
    if q.is_rational():
        # sqrt(p/s) = sqrt(p*s)/s
        fr = q.a
        m, k = _squarefree_split(fr.numerator * fr.denominator)
        return [(coeff * Fraction(m, fr.denominator), QField.rational(k))]
    t = qf_sqrt_if_exact(q)
    if t is not None:
        # exact root in the field: re-express as rational-radicand terms
        out: list[tuple[Fraction, QField]] = []
        for co, rad in ((t.a, 1), (t.b, 2), (t.c, 3), (t.d, 6)):
            if co != 0:
                out.extend(_canonical_terms(coeff * co, QField.rational(rad)))
        return out
    # scale radicand by rational squares to a canonical integer representative
    dens = [fr.denominator for fr in (q.a, q.b, q.c, q.d)]
    L = math.lcm(*dens)
    nums = [abs(fr.numerator * (L // fr.denominator)) for fr in (q.a, q.b, q.c, q.d)]
    G = math.gcd(*[n for n in nums if n] or [1])
    mg, kg = _squarefree_split(G)
    # q = (G/L) * qint ; sqrt(q) = (mg/L) * sqrt(L*kg*qint/1)... keep it simple:
    # q * (L/mg)^2 has integer coefficients with squarefree-ish content
    s = Fraction(mg, L)
    qhat = q.scale(Fraction(1) / (s * s))
    return [(coeff * s, qhat)]


class RadicalSum:
    """Finite sum  sum_i coeff_i * sqrt(q_i)  with q_i in Q(sqrt2,sqrt3), q_i > 0.

    Canonical payload: radicands normalised (rational squares extracted,
    field-exact roots denested), like terms merged, terms sorted.  Values are
    immutable and hash/compare on the payload.
    """

    __slots__ = ("terms", "_iv", "_float")

    def __init__(self, terms: Iterable[tuple[Fraction, QField]] = (), *, _canonical: bool = False):
        merged: dict[tuple[int, int, int, int, int], list] = {}
        for coeff, q in terms:
            parts = [(coeff, q)] if _canonical else _canonical_terms(_fr(coeff), q)
            for co, qq in parts:
                key = (qq.na, qq.nb, qq.nc, qq.nd, qq.q)
                ent = merged.get(key)
                if ent is None:
                    merged[key] = [co, qq]
                else:
                    ent[0] += co
        out = [
            (ent[0], ent[1])
            for key, ent in sorted(merged.items())
            if ent[0] != 0
        ]
        self.terms: tuple[tuple[Fraction, QField], ...] = tuple(out)
        self._iv: dict[int, tuple[Fraction, Fraction]] = {}
        self._float: float | None = None

    # constructors
    @staticmethod
    def zero() -> "RadicalSum":
        return RadicalSum()

    @staticmethod
    def of_rational(x: Rat) -> "RadicalSum":
        return RadicalSum([(_fr(x), QF_ONE)])

    @staticmethod
    def sqrt_of(q: QField) -> "RadicalSum":
        return RadicalSum([(Fraction(1), q)])

    def __add__(self, other: "RadicalSum") -> "RadicalSum":
        return RadicalSum(list(self.terms) + list(other.terms), _canonical=True)

    def __sub__(self, other: "RadicalSum") -> "RadicalSum":
        return RadicalSum(
            list(self.terms) + [(-c, q) for c, q in other.terms], _canonical=True
        )

    def scale(self, k: Rat) -> "RadicalSum":
        k = _fr(k)
        return RadicalSum([(c * k, q) for c, q in self.terms], _canonical=True)

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(q == QF_ONE for _, q in self.terms)

    def as_rational(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError("not a rational value")
        return self.terms[0][0]

    def squared_if_single(self) -> "QField | None":
        """q such that self = sqrt(q), when the payload is a single term."""
        if not self.terms:
            return QF_ZERO
        if len(self.terms) != 1:
            return None
        c, q = self.terms[0]
        if c < 0:
            return None
        return q.scale(c * c)

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        cached = self._iv.get(bits)
        if cached is not None:
            return cached
        lo = Fraction(0)
        hi = Fraction(0)
        for coeff, q in self.terms:
            ql, qh = q.interval(bits)
            ql = max(ql, Fraction(0))
            sl, _ = sqrt_bounds_fraction(ql, bits)
            _, sh = sqrt_bounds_fraction(qh, bits)
            l, h = _mul_interval(coeff, (sl, sh))
            lo += l
            hi += h
        self._iv[bits] = (lo, hi)
        return lo, hi

    def cert_interval(self, bits: int = 64) -> "CertInterval":
        lo, hi = self.interval(bits)
        return CertInterval(lo, hi, self, bits)

    def sign(self) -> int:
        if not self.terms:
            return 0
        signs = {q.sign() * (1 if c > 0 else -1) for c, q in self.terms}
        if signs == {1}:
            return 1
        if signs == {-1}:
            return -1
        # float screen with a conservative error bound: each term carries a
        # handful of ulps of relative error, so a margin of 1e-9 per unit of
        # summed magnitude leaves six orders of headroom
        total = 0.0
        mag = 0.0
        for c, q in self.terms:
            t = float(c) * math.sqrt(float(q))
            total += t
            mag += abs(t)
        if abs(total) > 1e-9 * (len(self.terms) + 1) * max(1.0, mag):
            return 1 if total > 0 else -1
        bits = 64
        cap = max_precision_bits()
        while bits <= cap:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        if self._symbolically_zero():
            return 0
        raise PrecisionExhausted(f"sign undecided at {cap} bits: {self}")

    def _symbolically_zero(self) -> bool:
        import sympy

        expr = sympy.Integer(0)
        for coeff, q in self.terms:
            expr += sympy.Rational(coeff) * sympy.sqrt(
                sympy.Rational(q.a)
                + sympy.Rational(q.b) * sympy.sqrt(2)
                + sympy.Rational(q.c) * sympy.sqrt(3)
                + sympy.Rational(q.d) * sympy.sqrt(6)
            )
        return sympy.simplify(expr) == 0

    def __float__(self) -> float:
        if self._float is None:
            self._float = float(
                sum(float(c) * math.sqrt(float(q)) for c, q in self.terms)
            )
        return self._float

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadicalSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __lt__(self, other: "RadicalSum") -> bool:
        return cmp_radical_sums(self, other) < 0

    def __le__(self, other: "RadicalSum") -> bool:
        return cmp_radical_sums(self, other) <= 0

    def __repr__(self) -> str:
        if not self.terms:
            return "RadicalSum(0)"
        parts = [f"{c}*sqrt({q.a},{q.b},{q.c},{q.d})" for c, q in self.terms]
        return "RadicalSum(" + " + ".join(parts) + ")"


def cmp_radical_sums(e1: RadicalSum, e2: RadicalSum) -> int:
    """Certified three-way comparison; raises PrecisionExhausted if undecided."""
    if e1.terms == e2.terms:
        return 0
    return (e1 - e2).sign()


RS_ZERO = RadicalSum.zero()
RS_ONE = RadicalSum.of_rational(1)


@dataclass
class CertInterval:
    """Rational bracket lo <= value <= hi around a radical-sum payload."""

    lo: Fraction
    hi: Fraction
    payload: RadicalSum
    bits: int = 64

    def refine(self) -> "CertInterval":
        bits = self.bits * 2
        lo, hi = self.payload.interval(bits)
        return CertInterval(lo, hi, self.payload, bits)

    def contains(self, other: "CertInterval | RadicalSum") -> bool:
        payload = other.payload if isinstance(other, CertInterval) else other
        return cmp_radical_sums(self.payload, payload) == 0

    def width(self) -> Fraction:
        return self.hi - self.lo


# exact cosines of multiples of pi/12 ---------------------------------------

_COS_PI12 = {
    0: QF_ONE,
    1: QField.of(0, Fraction(1, 4), 0, Fraction(1, 4)),  # (sqrt6+sqrt2)/4
    2: QField.of(0, 0, Fraction(1, 2)),
    3: QField.of(0, Fraction(1, 2)),
    4: QField.rational(Fraction(1, 2)),
    5: QField.of(0, Fraction(-1, 4), 0, Fraction(1, 4)),  # (sqrt6-sqrt2)/4
    6: QF_ZERO,
}


def cos_pi12(k: int) -> QField:
    """cos(k*pi/12) as an exact field element, any integer k."""
    k = k % 24
    if k > 12:
        k = 24 - k
    if k <= 6:
        return _COS_PI12[k]
    return -_COS_PI12[12 - k]


def sin_pi12(k: int) -> QField:
    return cos_pi12(k - 6)


def rs_of(x: QField) -> RadicalSum:
    """Lift a field element into a RadicalSum (1, sqrt2, sqrt3, sqrt6 terms)."""
    return RadicalSum(
        [
            (x.a, QF_ONE),
            (x.b, QField.rational(2)),
            (x.c, QField.rational(3)),
            (x.d, QField.rational(6)),
        ]
    )


def rs_sqrt_scaled(k: QField, q: QField) -> RadicalSum:
    """k * sqrt(q) as a RadicalSum, for any field k and positive field q."""
    s = k.sign()
    if s == 0 or q.is_zero():
        return RadicalSum.zero()
    return RadicalSum.sqrt_of(k * k * q).scale(s)
