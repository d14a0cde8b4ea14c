"""Exact and high-precision scalar arithmetic.

Three families of numbers live here:

* :class:`PadicNumber` -- elements of Q_p known to an explicit absolute
  precision ``O(p^N)``.  Precision is tracked honestly: subtracting close
  values loses digits and no operation invents digits it cannot justify.
* :class:`CycloNumber` -- exact elements of a cyclotomic field Q(zeta_n) in
  the power basis of zeta_n, with a fixed complex embedding
  zeta_n -> exp(2 pi i / n).
* :class:`HPReal` / :class:`HPComplex` -- mpmath scalars carrying an absolute
  error bound that is propagated conservatively.

Rational numbers are plain :class:`fractions.Fraction`; integers are ``int``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import mpmath
import numpy as np

Rational = Union[int, Fraction]

DEFAULT_BITS = 128
SAFETY = 2  # factor applied to every transcendental error estimate


class NotOrdinaryError(ValueError):
    """Raised when a unit root is requested at a supersingular prime."""


# ---------------------------------------------------------------------------
# integer helpers
# ---------------------------------------------------------------------------


def ord_p(x: Rational, p: int) -> int | float:
    """p-adic valuation of a rational number (``math.inf`` for zero)."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` as an int64 array (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for q in range(3, math.isqrt(n) + 1, 2):
        if sieve[q]:
            sieve[q * q :: 2 * q] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    """Chinese remainder theorem for pairwise coprime moduli."""
    x, mod = 0, 1
    for r, n in zip(residues, moduli):
        t = ((r - x) * pow(mod, -1, n)) % n
        x += mod * t
        mod *= n
    return x % mod, mod


# ---------------------------------------------------------------------------
# p-adic numbers
# ---------------------------------------------------------------------------


class PadicNumber:
    """An element of Q_p to absolute precision ``O(p^prec)``.

    The value is ``unit * p**val`` with ``unit`` a p-adic unit known modulo
    ``p**(prec - val)``.  A zero is stored with ``val == prec`` and
    ``unit == 0``.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int) -> None:
        self.p = p
        self.prec = prec
        rel = prec - val
        if rel > 0 and unit % p == 0 and unit % p**rel != 0:
            # unit carries extra powers of p: renormalize
            other = PadicNumber.from_rational(Fraction(unit) * Fraction(p) ** val, p, prec)
            self.val, self.unit = other.val, other.unit
        elif rel <= 0 or unit % p**rel == 0:
            self.val, self.unit = prec, 0
        else:
            self.val, self.unit = val, unit % p**rel

    # construction -----------------------------------------------------------
    @classmethod
    def from_rational(cls, x: Rational, p: int, prec: int) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls(p, prec, 0, prec)
        v = ord_p(x, p)
        assert isinstance(v, int)
        if v >= prec:
            return cls(p, prec, 0, prec)
        y = x / Fraction(p) ** v
        mod = p ** (prec - v)
        unit = (y.numerator * pow(y.denominator, -1, mod)) % mod
        return cls(p, v, unit, prec)

    @classmethod
    def from_digits(cls, p: int, digits: Sequence[int], prec: int | None = None,
                    start: int = 0) -> "PadicNumber":
        """Build ``sum digits[i] p^(start+i) + O(p^prec)``."""
        if prec is None:
            prec = start + len(digits)
        value = sum(Fraction(d) * Fraction(p) ** (start + i) for i, d in enumerate(digits))
        return cls.from_rational(value, p, prec)

    # accessors --------------------------------------------------------------
    @property
    def relprec(self) -> int:
        return self.prec - self.val

    def is_zero(self) -> bool:
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.val == 0 and not self.is_zero()

    def valuation(self) -> int:
        """Valuation, or the absolute precision when the value is O(p^N)."""
        return self.val

    def to_fraction(self) -> Fraction:
        """Canonical rational representative (unit digits in [0, p))."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def digits(self) -> list[int]:
        """Digits from ``p^val`` up to ``p^(prec-1)``."""
        out = []
        u = self.unit
        for _ in range(self.relprec if not self.is_zero() else 0):
            out.append(u % self.p)
            u //= self.p
        return out

    def digit_map(self) -> dict[int, int]:
        return {self.val + i: d for i, d in enumerate(self.digits())}

    def with_prec(self, prec: int) -> "PadicNumber":
        """Reduce to a lower absolute precision."""
        if prec >= self.prec:
            return self
        return PadicNumber.from_rational(self.to_fraction(), self.p, prec)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other: object) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("p-adic numbers for different primes")
            return other
        if isinstance(other, (int, Fraction)):
            v = ord_p(other, self.p)
            extra = 0 if v == math.inf else abs(int(v))
            return PadicNumber.from_rational(other, self.p,
                                             abs(self.prec) + abs(self.val) + extra + self.relprec + 8)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        prec = min(self.prec, o.prec)
        return PadicNumber.from_rational(self.to_fraction() + o.to_fraction(), self.p, prec)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        return PadicNumber.from_rational(-self.to_fraction(), self.p, self.prec)

    def __sub__(self, other: object) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "PadicNumber":
        return (-self) + other

    def __mul__(self, other: object) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        prec = min(self.val + o.prec, o.val + self.prec)
        return PadicNumber.from_rational(self.to_fraction() * o.to_fraction(), self.p, prec)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by a p-adic number indistinguishable from 0")
        val = self.val - o.val
        if self.is_zero():
            return PadicNumber(self.p, self.prec - o.val, 0, self.prec - o.val)
        rel = min(self.relprec, o.relprec)
        return PadicNumber.from_rational(self.to_fraction() / o.to_fraction(), self.p, val + rel)

    def __rtruediv__(self, other: object) -> "PadicNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "PadicNumber":
        if n < 0:
            return PadicNumber.from_rational(1, self.p, self.relprec + self.val * n + 8) / (self ** (-n))
        result = PadicNumber.from_rational(1, self.p, self.relprec + n * self.val + 8)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other) if not isinstance(other, PadicNumber) else other
        if o is NotImplemented:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self) -> int:
        return hash((self.p, self.prec))

    def congruent(self, other: object, k: int) -> bool:
        """True when the difference has valuation at least ``k`` (and ``k`` is justified)."""
        d = self - other
        return d.val >= k

    def __repr__(self) -> str:
        return f"PadicNumber({self})"

    def __str__(self) -> str:
        p = self.p
        terms = []
        for e, d in self.digit_map().items():
            if d == 0:
                continue
            if e == 0:
                terms.append(f"{d}")
            else:
                power = f"{p}" if e == 1 else f"{p}^{e}"
                terms.append(power if d == 1 else f"{d}*{power}")
        terms.append(f"O({p}^{self.prec})")
        return " + ".join(terms)


def hensel_roots(a_p: int, p: int, N: int) -> tuple[PadicNumber, PadicNumber]:
    """Roots ``(u, w)`` of ``x^2 - a_p x + p`` with ``u`` the p-adic unit root."""
    if a_p % p == 0:
        raise NotOrdinaryError(f"not ordinary: p={p} divides a_p={a_p}")
    mod = p ** (N + 2)
    u = a_p % p
    # Newton iteration; f'(u) = 2u - a_p is a unit because u is a unit and w is not
    k = 1
    while k < N + 2:
        k = min(2 * k, N + 2)
        m = p**k
        f = (u * u - a_p * u + p) % m
        df = (2 * u - a_p) % m
        u = (u - f * pow(df, -1, m)) % m
    u %= mod
    U = PadicNumber.from_rational(u, p, N)
    W = PadicNumber.from_rational(Fraction(p) * pow(u, -1, mod) % mod, p, N)
    return U, W


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_exact_div(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // lead
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert all(c == 0 for c in num), "inexact polynomial division"
    return out


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class CycloNumber:
    """Exact element of Q(zeta_n) in the power basis 1, zeta, ..., zeta^(phi(n)-1)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Iterable[Rational]) -> None:
        self.n = n
        self.coeffs = _reduce_cyclo(n, [Fraction(c) for c in coeffs])

    @classmethod
    def rational(cls, x: Rational, n: int = 1) -> "CycloNumber":
        return cls(n, [x])

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycloNumber":
        """The root of unity exp(2 pi i k / n)."""
        k %= n
        return cls(n, [0] * k + [1])

    def lift(self, n: int) -> "CycloNumber":
        """Rewrite in Q(zeta_n) for a multiple n of the current conductor."""
        if n == self.n:
            return self
        if n % self.n:
            raise ValueError("target conductor must be a multiple")
        step = n // self.n
        out = [Fraction(0)] * (step * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return CycloNumber(n, out)

    def _common(self, other: "CycloNumber") -> tuple["CycloNumber", "CycloNumber"]:
        n = math.lcm(self.n, other.n)
        return self.lift(n), other.lift(n)

    def _wrap(self, other: object) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber(self.n, [other])
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "CycloNumber":
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self._common(o)
        size = max(len(a.coeffs), len(b.coeffs))
        ca = a.coeffs + [Fraction(0)] * (size - len(a.coeffs))
        cb = b.coeffs + [Fraction(0)] * (size - len(b.coeffs))
        return CycloNumber(a.n, [x + y for x, y in zip(ca, cb)])

    __radd__ = __add__

    def __neg__(self) -> "CycloNumber":
        return CycloNumber(self.n, [-c for c in self.coeffs])

    def __sub__(self, other: object) -> "CycloNumber":
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "CycloNumber":
        return (-self) + other

    def __mul__(self, other: object) -> "CycloNumber":
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self._common(o)
        out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        out[i + j] += x * y
        return CycloNumber(a.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CycloNumber":
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNumber(self.n, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycloNumber":
        """Complex conjugation zeta -> zeta^-1."""
        out = [Fraction(0)] * self.n
        for i, c in enumerate(self.coeffs):
            out[(-i) % self.n] += c
        return CycloNumber(self.n, out)

    def galois(self, a: int) -> "CycloNumber":
        """The automorphism zeta -> zeta^a (a coprime to n)."""
        out = [Fraction(0)] * self.n
        for i, c in enumerate(self.coeffs):
            out[(i * a) % self.n] += c
        return CycloNumber(self.n, out)

    def norm(self) -> Fraction:
        """Absolute norm to Q."""
        value = CycloNumber(self.n, [1])
        for a in range(1, max(self.n, 2)):
            if math.gcd(a, self.n) == 1:
                value = value * self.galois(a)
        q = value.rational_value()
        assert q is not None
        return q

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        others = CycloNumber(self.n, [1])
        for a in range(2, max(self.n, 2)):
            if math.gcd(a, self.n) == 1:
                others = others * self.galois(a)
        nrm = (self * others).rational_value()
        assert nrm is not None
        return others * (Fraction(1) / nrm)

    def __truediv__(self, other: object) -> "CycloNumber":
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def rational_value(self) -> Fraction | None:
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0] if self.coeffs else Fraction(0)
        return None

    def __eq__(self, other: object) -> bool:
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self) -> int:
        q = self.rational_value()
        return hash(q) if q is not None else hash(tuple(self.coeffs))

    def embed(self, bits: int = DEFAULT_BITS) -> "HPComplex":
        return cyclo_embed(self, bits)

    def __complex__(self) -> complex:
        return complex(self.embed(64).mid)

    def __repr__(self) -> str:
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"CycloNumber({self.n}: {' + '.join(terms) or '0'})"


def _reduce_cyclo(n: int, coeffs: list[Fraction]) -> list[Fraction]:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    c = list(coeffs)
    for i in range(len(c) - 1, deg - 1, -1):
        t = c[i]
        if t:
            for j in range(deg):
                c[i - deg + j] -= t * phi[j]
            c[i] = Fraction(0)
    c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
    return c


def cyclo_embed(x: CycloNumber, bits: int = DEFAULT_BITS) -> "HPComplex":
    """Complex value of ``x`` under zeta_n -> exp(2 pi i / n), with an error bound."""
    with mpmath.workprec(bits + 32):
        total = mpmath.mpc(0)
        weight = mpmath.mpf(0)
        for k, c in enumerate(x.coeffs):
            if c:
                cf = mpmath.mpf(c.numerator) / c.denominator
                total += cf * mpmath.expjpi(mpmath.mpf(2 * k) / x.n)
                weight += abs(cf)
        err = (weight + 1) * mpmath.ldexp(1, -(bits + 16)) * SAFETY
    return HPComplex(total, err)


# ---------------------------------------------------------------------------
# high-precision scalars with error bounds
# ---------------------------------------------------------------------------


def _mp(x: object) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


class HPReal:
    """Real number ``mid`` with absolute error at most ``err``."""

    __slots__ = ("mid", "err")

    def __init__(self, mid: object, err: object = 0) -> None:
        self.mid = _mp(mid)
        self.err = abs(_mp(err))

    def _w(self, other: object) -> "HPReal":
        if isinstance(other, HPReal):
            return other
        return HPReal(other, 0)

    def __add__(self, other: object) -> "HPReal":
        o = self._w(other)
        mid = self.mid + o.mid
        return HPReal(mid, self.err + o.err + _ulp(mid))

    __radd__ = __add__

    def __neg__(self) -> "HPReal":
        return HPReal(-self.mid, self.err)

    def __sub__(self, other: object) -> "HPReal":
        return self + (-self._w(other))

    def __rsub__(self, other: object) -> "HPReal":
        return (-self) + other

    def __mul__(self, other: object) -> "HPReal":
        o = self._w(other)
        mid = self.mid * o.mid
        err = abs(self.mid) * o.err + abs(o.mid) * self.err + self.err * o.err
        return HPReal(mid, err + _ulp(mid))

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "HPReal":
        o = self._w(other)
        if abs(o.mid) <= o.err:
            raise ZeroDivisionError("divisor interval contains zero")
        mid = self.mid / o.mid
        lo = abs(o.mid) - o.err
        err = (self.err + abs(mid) * o.err) / lo
        return HPReal(mid, err + _ulp(mid))

    def __rtruediv__(self, other: object) -> "HPReal":
        return self._w(other) / self

    def __pow__(self, k: int) -> "HPReal":
        out = HPReal(1)
        for _ in range(abs(k)):
            out = out * self
        return out if k >= 0 else HPReal(1) / out

    def exp(self) -> "HPReal":
        mid = mpmath.exp(self.mid)
        return HPReal(mid, SAFETY * mid * mpmath.expm1(self.err) + _ulp(mid))

    def log(self) -> "HPReal":
        if self.mid - self.err <= 0:
            raise ValueError("log of a non-positive interval")
        mid = mpmath.log(self.mid)
        return HPReal(mid, SAFETY * self.err / (self.mid - self.err) + _ulp(mid))

    def sqrt(self) -> "HPReal":
        if self.mid - self.err < 0:
            raise ValueError("sqrt of a negative interval")
        mid = mpmath.sqrt(self.mid)
        lo = mpmath.sqrt(max(self.mid - self.err, 0))
        return HPReal(mid, SAFETY * (mid - lo) + _ulp(mid))

    def gamma(self) -> "HPReal":
        mid = mpmath.gamma(self.mid)
        if self.err == 0:
            return HPReal(mid, _ulp(mid) * 4)
        deriv = abs(mid * mpmath.digamma(self.mid))
        return HPReal(mid, SAFETY * (deriv * self.err + self.err**2 * abs(mid) * 10) + _ulp(mid))

    def __abs__(self) -> "HPReal":
        return HPReal(abs(self.mid), self.err)

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x: object) -> bool:
        return abs(self.mid - _mp(x)) <= self.err

    def __repr__(self) -> str:
        return f"HPReal({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.err, 3)})"


class HPComplex:
    """Complex number ``mid`` with absolute error at most ``err``."""

    __slots__ = ("mid", "err")

    def __init__(self, mid: object, err: object = 0) -> None:
        if isinstance(mid, Fraction):
            mid = _mp(mid)
        self.mid = mpmath.mpc(mid)
        self.err = abs(_mp(err))

    def _w(self, other: object) -> "HPComplex":
        if isinstance(other, HPComplex):
            return other
        if isinstance(other, HPReal):
            return HPComplex(other.mid, other.err)
        return HPComplex(other, 0)

    def __add__(self, other: object) -> "HPComplex":
        o = self._w(other)
        mid = self.mid + o.mid
        return HPComplex(mid, self.err + o.err + _ulp(abs(mid)))

    __radd__ = __add__

    def __neg__(self) -> "HPComplex":
        return HPComplex(-self.mid, self.err)

    def __sub__(self, other: object) -> "HPComplex":
        return self + (-self._w(other))

    def __mul__(self, other: object) -> "HPComplex":
        o = self._w(other)
        mid = self.mid * o.mid
        err = abs(self.mid) * o.err + abs(o.mid) * self.err + self.err * o.err
        return HPComplex(mid, err + _ulp(abs(mid)))

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "HPComplex":
        o = self._w(other)
        if abs(o.mid) <= o.err:
            raise ZeroDivisionError("divisor disc contains zero")
        mid = self.mid / o.mid
        err = (self.err + abs(mid) * o.err) / (abs(o.mid) - o.err)
        return HPComplex(mid, err + _ulp(abs(mid)))

    def real(self) -> HPReal:
        return HPReal(self.mid.real, self.err)

    def imag(self) -> HPReal:
        return HPReal(self.mid.imag, self.err)

    def __abs__(self) -> HPReal:
        return HPReal(abs(self.mid), self.err)

    def contains(self, z: object) -> bool:
        return abs(self.mid - mpmath.mpc(z)) <= self.err

    def __complex__(self) -> complex:
        return complex(self.mid)

    def __repr__(self) -> str:
        return f"HPComplex({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.err, 3)})"


def _ulp(x: object) -> mpmath.mpf:
    """One unit in the last place at the current working precision."""
    ax = abs(x)
    if ax == 0:
        return mpmath.mpf(0)
    return mpmath.ldexp(ax, -mpmath.mp.prec + 1)
