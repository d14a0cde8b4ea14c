"""Elliptic curves over Q and their local data over the fields of the tower.

Contents:

* :class:`Curve` -- global minimal model over Q with cached invariants.
* Tate's algorithm, written once over an abstract complete discrete
  valuation ring with residue field F_q; it runs over Z_q and over totally
  ramified extensions Z_q[pi] with pi^e = q * (unit).
* Frobenius traces a_q (direct count for small q, baby-step giant-step in
  the compiled kernel otherwise), counts over residue fields F_(q^f).
* Local data over K, L and F with the transfer rules for good and
  multiplicative reduction, and Tate's algorithm over the ramified
  completion for additive primes dividing m.
* Periods by the arithmetic-geometric mean, torsion orders over Q, K and
  L, and the correction ideal comparing the Neron differential over an
  extension with the one over Q.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from typing import Any, Callable, Iterable, Sequence

import mpmath
import numpy as np
import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcd, gf_monic, gf_pow_mod, gf_sub

from . import kernels
from .fieldtower import Tower, UnsupportedError, prime_decomposition
from .numerics import DEFAULT_BITS, HPReal, ord_p

GOOD = "good"
SPLIT = "split-mult"
NONSPLIT = "nonsplit-mult"
ADDITIVE = "additive"


# ---------------------------------------------------------------------------
# Weierstrass invariants
# ---------------------------------------------------------------------------


def b_invariants(a: Sequence[Any]) -> tuple[Any, Any, Any, Any]:
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a: Sequence[Any]) -> tuple[Any, Any, Any]:
    b2, b4, b6, b8 = b_invariants(a)
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, disc


def rst_transform(a: Sequence[Any], r: Any, s: Any, t: Any) -> tuple[Any, ...]:
    """Coefficients after x = x' + r, y = y' + s x' + t."""
    a1, a2, a3, a4, a6 = a
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
    )


# ---------------------------------------------------------------------------
# local rings with residue field F_q
# ---------------------------------------------------------------------------


class _IntegerRing:
    """Z localized at q, with exact integer elements."""

    def __init__(self, q: int) -> None:
        self.q = q
        self.e = 1
        self.pi = q

    def val(self, x: int) -> int:
        v = ord_p(x, self.q)
        return 10**9 if v == math.inf else int(v)

    def residue(self, x: int) -> int:
        return x % self.q

    def div(self, x: int, k: int) -> int:
        d = self.q**k
        if x % d:
            raise ArithmeticError("inexact division by a power of the uniformizer")
        return x // d

    def lift(self, r: int) -> int:
        return r


class _RamElt:
    """Element sum c_i pi^i (0 <= i < e) of Z_q[pi], coefficients modulo q^N."""

    __slots__ = ("R", "c")

    def __init__(self, R: "_RamifiedRing", c: Sequence[int]) -> None:
        self.R = R
        self.c = tuple(x % R.mod for x in c)

    def _w(self, other: Any) -> "_RamElt":
        if isinstance(other, _RamElt):
            return other
        return self.R.from_int(int(other))

    def __add__(self, other: Any) -> "_RamElt":
        o = self._w(other)
        return _RamElt(self.R, [x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self) -> "_RamElt":
        return _RamElt(self.R, [-x for x in self.c])

    def __sub__(self, other: Any) -> "_RamElt":
        return self + (-self._w(other))

    def __rsub__(self, other: Any) -> "_RamElt":
        return self._w(other) - self

    def __mul__(self, other: Any) -> "_RamElt":
        o = self._w(other)
        R = self.R
        e = R.e
        out = [0] * (2 * e)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(o.c):
                    if y:
                        out[i + j] += x * y
        # pi^e = q * u
        res = out[:e]
        for k in range(e, 2 * e):
            res[k - e] += out[k] * R.q * R.u
        return _RamElt(R, res)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "_RamElt":
        out = self.R.from_int(1)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self) -> str:
        return f"RamElt{self.c}"


class _RamifiedRing:
    """Z_q[pi] with pi^e = q u, u a rational unit at q; residue field F_q."""

    def __init__(self, q: int, e: int, u: int, N: int = 40) -> None:
        self.q, self.e, self.u, self.N = q, e, u, N
        self.mod = q**N
        self.u_inv = pow(u, -1, self.mod)
        self.pi = _RamElt(self, [0, 1] + [0] * (e - 2)) if e > 1 else _RamElt(self, [q])

    def from_int(self, x: int) -> _RamElt:
        return _RamElt(self, [x] + [0] * (self.e - 1))

    def val(self, x: Any) -> int:
        x = x if isinstance(x, _RamElt) else self.from_int(int(x))
        best = 10**9
        for i, c in enumerate(x.c):
            if c:
                v = ord_p(c, self.q)
                best = min(best, self.e * int(v) + i)
        # values beyond the working precision count as zero
        return best if best < self.e * (self.N - 8) else 10**9

    def residue(self, x: Any) -> int:
        x = x if isinstance(x, _RamElt) else self.from_int(int(x))
        return x.c[0] % self.q

    def div(self, x: Any, k: int) -> _RamElt:
        x = x if isinstance(x, _RamElt) else self.from_int(int(x))
        for _ in range(k):
            c = list(x.c)
            if c[0] % self.q:
                raise ArithmeticError("inexact division by the uniformizer")
            # x / pi = sum_{i>=1} c_i pi^(i-1) + (c_0 / q) u^-1 pi^(e-1)
            lead = (c[0] // self.q) * self.u_inv
            x = _RamElt(self, c[1:] + [lead]) if self.e > 1 else _RamElt(self, [c[0] // self.q])
        return x

    def lift(self, r: int) -> _RamElt:
        return self.from_int(r)


# ---------------------------------------------------------------------------
# residue-field helpers
# ---------------------------------------------------------------------------


def _poly_roots_mod(coeffs: Sequence[int], q: int) -> int:
    """Number of distinct roots in F_q of sum coeffs[i] x^i (coeffs low to high)."""
    c = [int(x) % q for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        return q
    if len(c) == 1:
        return 0
    if q < 5000:
        x = np.arange(q, dtype=np.int64)
        val = np.zeros(q, dtype=np.int64)
        for coef in reversed(c):
            val = (val * x + coef) % q
        return int(np.count_nonzero(val == 0))
    # degree of gcd(f, x^q - x)
    f = gf_monic(list(reversed(c)), q, ZZ)[1]
    h = gf_pow_mod([1, 0], q, f, q, ZZ)
    return len(gf_gcd(gf_sub(h, [1, 0], q, ZZ), f, q, ZZ)) - 1


def _quad_has_root(a: int, b: int, c: int, q: int) -> bool:
    a, b, c = a % q, b % q, c % q
    if a == 0:
        return b != 0 or c == 0
    if q == 2:
        return any((a * x * x + b * x + c) % 2 == 0 for x in range(2))
    d = (b * b - 4 * a * c) % q
    return d == 0 or pow(d, (q - 1) // 2, q) == 1


# ---------------------------------------------------------------------------
# Tate's algorithm
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TateResult:
    kind: str
    kodaira: str
    conductor_exponent: int
    tamagawa: int
    disc_valuation: int  # valuation of the discriminant of the minimal model
    nonminimal_steps: int
    model: tuple[Any, ...]


def tate_algorithm(ainv: Sequence[Any], R: Any) -> TateResult:
    """Tate's algorithm over the local ring ``R`` (residue field F_q)."""
    q = R.q
    pval, res, div, lift = R.val, R.residue, R.div, R.lift

    def pdiv(x: Any) -> bool:
        return pval(x) > 0

    def pinv(x: Any) -> int:
        return pow(res(x), -1, q)

    half = pow(2, -1, q) if q != 2 else None
    a = tuple(ainv)
    steps = 0
    while True:
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = b_invariants(a)
        c4, c6, delta = c_invariants(a)
        vD = pval(delta)
        if vD == 0:
            return TateResult(GOOD, "I0", 0, 1, 0, steps, a)
        # move the singular point to (0, 0)
        if q == 2:
            if pdiv(b2):
                r = res(a4)
                t = res(((r + a2) * r + a4) * r + a6)
            else:
                r = res(a3) * pinv(a1) % 2
                t = pinv(a1) * res(a4 + r * r) % 2
        elif q == 3:
            r = res(-b6) if pdiv(b2) else (-pinv(b2) * res(b4)) % 3
            t = res(a1 * r + a3)
        else:
            if pdiv(c4):
                r = (-pow(12, -1, q) * res(b2)) % q
            else:
                r = (-pow(12 * res(c4), -1, q) * res(c6 + b2 * c4)) % q
            t = (-half * res(a1 * r + a3)) % q
        a = rst_transform(a, lift(r), lift(0), lift(t))
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = b_invariants(a)
        if not pdiv(c4):
            split = _quad_has_root(1, res(a1), -res(a2), q)
            if split:
                return TateResult(SPLIT, f"I{vD}", 1, vD, vD, steps, a)
            return TateResult(NONSPLIT, f"I{vD}", 1, 2 if vD % 2 == 0 else 1, vD, steps, a)
        if pval(a6) < 2:
            return TateResult(ADDITIVE, "II", vD, 1, vD, steps, a)
        if pval(b8) < 3:
            return TateResult(ADDITIVE, "III", vD - 1, 2, vD, steps, a)
        if pval(b6) < 3:
            c = 3 if _quad_has_root(1, res(div(a3, 1)), -res(div(a6, 2)), q) else 1
            return TateResult(ADDITIVE, "IV", vD - 2, c, vD, steps, a)
        pi = R.pi
        if q == 2:
            s = res(a2)
            t = pi * lift(res(div(a6, 2)))
        elif q == 3:
            s = res(a1)
            t = a3
        else:
            s = (-res(a1) * half) % q
            t = -(a3 * lift(half))
        a = rst_transform(a, lift(0), lift(s), t)
        a1, a2, a3, a4, a6 = a
        b = res(div(a2, 1))
        c = res(div(a4, 2))
        d = res(div(a6, 3))
        w = (27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3) % q
        x = (3 * c - b * b) % q
        if w != 0:
            n_roots = _poly_roots_mod([d, c, b, 1], q)
            return TateResult(ADDITIVE, "I0*", vD - 4, 1 + n_roots, vD, steps, a)
        if x != 0:
            # one double root: move it to 0
            if q == 2:
                r = c
            elif q == 3:
                r = c * pow(b, -1, 3)
            else:
                r = ((b * c - 9 * d) * pow(2 * x, -1, q)) % q
            a = rst_transform(a, pi * lift(r % q), lift(0), lift(0))
            ix, iy = 3, 3
            while True:
                a1, a2, a3, a4, a6 = a
                a2t = res(div(a2, 1))
                a3t = res(div(a3, iy - 1))
                a4t = res(div(a4, ix))
                a6t = res(div(a6, ix + iy - 2))
                if (a3t * a3t + 4 * a6t) % q == 0:
                    tt = a6t % 2 if q == 2 else (-a3t * half) % q
                    a = rst_transform(a, lift(0), lift(0), lift(tt) * (pi ** (iy - 1)))
                    iy += 1
                    a1, a2, a3, a4, a6 = a
                    a2t = res(div(a2, 1))
                    a4t = res(div(a4, ix))
                    a6t = res(div(a6, ix + iy - 2))
                    if (a4t * a4t - 4 * a6t * a2t) % q == 0:
                        rr = (a6t * pow(a2t, -1, 2)) % 2 if q == 2 else (-a4t * pow(2 * a2t, -1, q)) % q
                        a = rst_transform(a, lift(rr) * (pi ** (ix - 1)), lift(0), lift(0))
                        ix += 1
                        continue
                    cp = 4 if _quad_has_root(a2t, a4t, a6t, q) else 2
                    break
                cp = 4 if _quad_has_root(1, a3t, -a6t, q) else 2
                break
            n = ix + iy - 5
            return TateResult(ADDITIVE, f"I{n}*", vD - ix - iy + 1, cp, vD, steps, a)
        # triple root: move it to 0
        if q == 2:
            r = b
        elif q == 3:
            r = (-d) % 3
        else:
            r = (-b * pow(3, -1, q)) % q
        a = rst_transform(a, pi * lift(r), lift(0), lift(0))
        a1, a2, a3, a4, a6 = a
        x3 = res(div(a3, 2))
        x6 = res(div(a6, 4))
        if (x3 * x3 + 4 * x6) % q != 0:
            c = 3 if _quad_has_root(1, x3, -x6, q) else 1
            return TateResult(ADDITIVE, "IV*", vD - 6, c, vD, steps, a)
        tt = x6 % 2 if q == 2 else (-x3 * half) % q
        sign = -1 if q == 2 else 1
        a = rst_transform(a, lift(0), lift(0), sign * lift(tt) * pi * pi)
        a1, a2, a3, a4, a6 = a
        if pval(a4) < 4:
            return TateResult(ADDITIVE, "III*", vD - 7, 2, vD, steps, a)
        if pval(a6) < 6:
            return TateResult(ADDITIVE, "II*", vD - 8, 1, vD, steps, a)
        # non-minimal: scale by the uniformizer and start again
        a = (div(a1, 1), div(a2, 2), div(a3, 3), div(a4, 4), div(a6, 6))
        steps += 1


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalData:
    """Reduction data of E at one prime (of Q or of a field in the tower)."""

    q: int
    e: int
    f: int
    count: int  # number of primes above q with this (e, f) and data
    kind: str
    kodaira: str
    tamagawa: int
    trace: int | None  # a_v for good reduction
    poly: tuple[int, ...]  # P_v(T), constant term first, in T = Nv^-s
    flags: tuple[str, ...] = ()

    @property
    def norm(self) -> int:
        return self.q**self.f

    def points(self) -> int:
        """#E~(F_v) for good reduction, P_v(1)."""
        if self.kind != GOOD:
            raise ValueError("point count requested at a bad prime")
        return sum(self.poly)


def _normalize(a: Sequence[int]) -> tuple[int, ...]:
    a1, a2, a3, a4, a6 = a
    s = -(a1 // 2)
    val = a2 - s * a1 - s * s
    r = -((val + 1) // 3)
    t = -((a3 + r * a1) // 2)
    return tuple(int(x) for x in rst_transform(a, r, s, t))


class Curve:
    """Elliptic curve over Q, stored as its reduced global minimal model."""

    def __init__(self, ainv: Sequence[int], label: str | None = None) -> None:
        a = tuple(int(x) for x in ainv)
        if len(a) != 5:
            raise ValueError("need five coefficients a1,a2,a3,a4,a6")
        if c_invariants(a)[2] == 0:
            raise ValueError("singular Weierstrass equation")
        self.input_model = a
        self.ainvs = self._minimalize(a)
        self.label = label
        self._local: dict[int, LocalData] = {}

    @staticmethod
    def _minimalize(a: tuple[int, ...]) -> tuple[int, ...]:
        changed = True
        while changed:
            changed = False
            delta = c_invariants(a)[2]
            for q in sorted(sympy.factorint(abs(delta))):
                if ord_p(delta, q) < 12:
                    continue
                res = tate_algorithm(a, _IntegerRing(q))
                if res.nonminimal_steps:
                    a = tuple(int(x) for x in res.model)
                    changed = True
                    break
        return _normalize(a)

    # invariants --------------------------------------------------------------
    @property
    def a_invariants(self) -> tuple[int, ...]:
        return self.ainvs

    @cached_property
    def b(self) -> tuple[int, int, int, int]:
        return b_invariants(self.ainvs)

    @cached_property
    def c4(self) -> int:
        return c_invariants(self.ainvs)[0]

    @cached_property
    def c6(self) -> int:
        return c_invariants(self.ainvs)[1]

    @cached_property
    def discriminant(self) -> int:
        return c_invariants(self.ainvs)[2]

    @cached_property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    @cached_property
    def bad_primes(self) -> list[int]:
        return sorted(sympy.factorint(abs(self.discriminant)))

    @cached_property
    def conductor(self) -> int:
        N = 1
        for q in self.bad_primes:
            N *= q ** self.local(q).conductor_exponent
        return N

    def local(self, q: int) -> TateResult:
        if q not in self._local:
            self._local[q] = tate_algorithm(self.ainvs, _IntegerRing(q))  # type: ignore[assignment]
        return self._local[q]  # type: ignore[return-value]

    def kind(self, q: int) -> str:
        if self.discriminant % q:
            return GOOD
        return self.local(q).kind

    def is_semistable(self) -> bool:
        return all(self.kind(q) != ADDITIVE for q in self.bad_primes)

    def root_number_local_mult(self, q: int) -> int:
        """Local sign at a multiplicative prime: -1 split, +1 nonsplit."""
        return -1 if self.kind(q) == SPLIT else 1

    def __repr__(self) -> str:
        tag = f"{self.label} " if self.label else ""
        return f"Curve({tag}{list(self.ainvs)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Curve) and self.ainvs == other.ainvs

    def __hash__(self) -> int:
        return hash(self.ainvs)

    # reduction counts ---------------------------------------------------------
    def count_points_naive(self, q: int) -> int:
        """#E~(F_q) (affine points plus infinity) by direct enumeration."""
        a1, a2, a3, a4, a6 = (x % q for x in self.ainvs)
        x = np.arange(q, dtype=np.int64)
        total = 1
        if q <= 3:
            for xx in range(q):
                for yy in range(q):
                    if (yy * yy + a1 * xx * yy + a3 * yy - xx**3 - a2 * xx * xx - a4 * xx - a6) % q == 0:
                        total += 1
            return total
        b2, b4, b6, _ = (v % q for v in self.b)
        f = ((4 * x % q * x % q * x) + b2 * x % q * x + 2 * b4 * x + b6) % q
        squares = np.zeros(q, dtype=bool)
        squares[(x * x) % q] = True
        # number of Y with Y^2 = f is 1 + chi(f)
        chi = np.where(f == 0, 0, np.where(squares[f], 1, -1))
        return int(total + q + chi.sum())


def ap(E: Curve, q: int) -> int:
    """Trace of Frobenius a_q = q + 1 - #E~(F_q) at a prime of good reduction."""
    if E.discriminant % q == 0:
        raise ValueError(f"bad prime {q}: a_q is defined only for good reduction")
    if q <= 1_000_000:
        return q + 1 - E.count_points_naive(q)
    return int(frobenius_traces(E, np.array([q], dtype=np.int64))[0])


def frobenius_traces(E: Curve, primes: np.ndarray) -> np.ndarray:
    """a_q for an array of primes; bad primes get the Euler-factor trace.

    At bad primes the entry is 1 (split multiplicative), -1 (nonsplit) or 0
    (additive), so that the local factor is always 1 - a_q T (+ q T^2 if good).
    """
    primes = np.asarray(primes, dtype=np.int64)
    out = np.zeros(len(primes), dtype=np.int64)
    bad = set(E.bad_primes)
    mask_big = primes >= 5
    for i in np.nonzero(~mask_big)[0]:
        q = int(primes[i])
        out[i] = _bad_trace(E, q) if q in bad else q + 1 - E.count_points_naive(q)
    idx = np.nonzero(mask_big)[0]
    if len(idx):
        ps = primes[idx]
        A = _mod_array(-27 * E.c4, ps)
        B = _mod_array(-54 * E.c6, ps)
        vals = kernels.ap_array(E.ainvs, ps, A, B)
        for j in np.nonzero(vals == kernels.FAILED)[0]:
            q = int(ps[j])
            vals[j] = q + 1 - E.count_points_naive(q)
        out[idx] = vals
        for q in bad:
            hit = np.nonzero(primes == q)[0]
            if len(hit):
                out[hit] = _bad_trace(E, q)
    return out


def _mod_array(c: int, primes: np.ndarray) -> np.ndarray:
    if abs(c) < 2**62:
        return np.mod(np.int64(c), primes).astype(np.int64)
    return np.array([c % int(q) for q in primes.tolist()], dtype=np.int64)


def _bad_trace(E: Curve, q: int) -> int:
    k = E.kind(q)
    return {SPLIT: 1, NONSPLIT: -1}.get(k, 0)


def trace_power(a: int, q: int, f: int) -> int:
    """alpha^f + beta^f where alpha, beta are the roots of x^2 - a x + q."""
    s_prev, s = 2, a
    if f == 0:
        return 2
    for _ in range(f - 1):
        s_prev, s = s, a * s - q * s_prev
    return s


def local_poly_Q(E: Curve, q: int) -> tuple[int, ...]:
    k = E.kind(q)
    if k == GOOD:
        return (1, -ap(E, q), q)
    if k == SPLIT:
        return (1, -1)
    if k == NONSPLIT:
        return (1, 1)
    return (1,)


def tate_local(E: Curve, q: int) -> LocalData:
    """Reduction type, Kodaira symbol, Tamagawa number and local factor at q."""
    if E.discriminant % q:
        a = ap(E, q)
        return LocalData(q, 1, 1, 1, GOOD, "I0", 1, a, (1, -a, q))
    r = E.local(q)
    return LocalData(q, 1, 1, 1, r.kind, r.kodaira, r.tamagawa, None, local_poly_Q(E, q))


def points_over(E: Curve, q: int, f: int) -> int:
    """#E~(F_(q^f)) for q of good reduction."""
    return q**f + 1 - trace_power(ap(E, q), q, f)


# ---------------------------------------------------------------------------
# local data over the tower fields
# ---------------------------------------------------------------------------


def _ramified_ring(q: int, tower: Tower) -> _RamifiedRing:
    """Completion of Q(m^(1/p)) at the prime above q | m, with uniformizer pi."""
    p, m = tower.p, tower.m
    a = ord_p(m, q)
    assert isinstance(a, int) and 0 < a < p
    mprime = m // q**a
    # pi = theta^b / q^c with a b - p c = 1 has pi^p = q * mprime^b
    b = pow(a, -1, p)
    c = (a * b - 1) // p
    del c
    return _RamifiedRing(q, p, mprime**b)


def local_data_over(E: Curve, fld: str, q: int, tower: Tower) -> list[LocalData]:
    """Local data at every prime of ``fld`` above the rational prime q."""
    decomposition = prime_decomposition(q, fld, tower)
    groups: dict[tuple[int, int], int] = {}
    for ef in decomposition:
        groups[ef] = groups.get(ef, 0) + 1
    out = []
    kind = E.kind(q)
    for (e, f), count in groups.items():
        if kind == GOOD:
            a = ap(E, q)
            av = trace_power(a, q, f)
            out.append(LocalData(q, e, f, count, GOOD, "I0", 1, av, (1, -av, q**f)))
            continue
        base = E.local(q)
        if kind in (SPLIT, NONSPLIT):
            n = base.disc_valuation * e
            split = kind == SPLIT or f % 2 == 0
            c = n if split else (2 if n % 2 == 0 else 1)
            k = SPLIT if split else NONSPLIT
            out.append(LocalData(q, e, f, count, k, f"I{n}", c, None, (1, -1) if split else (1, 1)))
            continue
        # additive
        if e == 1:
            flags = ("unverified component-group splitting",) if f > 1 else ()
            out.append(LocalData(q, e, f, count, ADDITIVE, base.kodaira, base.tamagawa, None, (1,), flags))
            continue
        if q == tower.p:
            raise UnsupportedError("unsupported: additive reduction at p")
        res = tate_algorithm(E.ainvs, _ramified_ring(q, tower))
        flags = ("unverified component-group splitting",) if f > 1 else ()
        if res.kind == GOOD:
            poly: tuple[int, ...] = (1,)  # potentially good: the local factor is not used here
            out.append(LocalData(q, e, f, count, GOOD, "I0", 1, None, poly, flags + ("good after ramified base change",)))
        else:
            polyb = {SPLIT: (1, -1), NONSPLIT: (1, 1)}.get(res.kind, (1,))
            out.append(LocalData(q, e, f, count, res.kind, res.kodaira, res.tamagawa, None, polyb, flags))
    return out


def tamagawa_product(E: Curve, fld: str, tower: Tower | None) -> int:
    """Product of Tamagawa numbers over all bad primes of the field."""
    if fld == "Q" or tower is None:
        c = 1
        for q in E.bad_primes:
            c *= E.local(q).tamagawa
        return c
    c = 1
    for q in E.bad_primes:
        for ld in local_data_over(E, fld, q, tower):
            c *= ld.tamagawa**ld.count
    return c


# ---------------------------------------------------------------------------
# model correction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelCorrection:
    """Ideal relating the Neron differential over a field to that of E/Q."""

    field: str
    orders: dict[int, int]  # rational prime q -> ord of the ideal at each prime above q
    norm: Fraction


def model_correction(E: Curve, fld: str, tower: Tower | None) -> ModelCorrection:
    """Correction ideal over K, L or F (trivial for semistable curves)."""
    if fld == "Q" or tower is None:
        return ModelCorrection(fld, {}, Fraction(1))
    orders: dict[int, int] = {}
    norm = Fraction(1)
    for q in E.bad_primes:
        if E.kind(q) != ADDITIVE:
            continue
        if fld == "K" and q != tower.p:
            continue
        if fld in ("L", "F") and tower.m % q and q != tower.p:
            continue
        if q == tower.p:
            raise UnsupportedError("unsupported: additive reduction at p")
        res = tate_algorithm(E.ainvs, _ramified_ring(q, tower))
        k = res.nonminimal_steps
        if k:
            orders[q] = k
            for e, f in prime_decomposition(q, fld, tower):
                norm *= Fraction(q) ** (f * k)
    return ModelCorrection(fld, orders, norm)


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Periods:
    """Omega_+ (real) and Omega_- = i * Omega_minus_im."""

    Omega_plus: HPReal
    Omega_minus_im: HPReal
    real_period: HPReal  # least positive real period
    covolume: HPReal


def periods(E: Curve, bits: int = DEFAULT_BITS) -> Periods:
    """Periods of the Neron differential via the arithmetic-geometric mean."""
    b2, b4, b6, _ = E.b
    work = bits + 40
    with mpmath.workprec(work):
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=400, extraprec=work)
        tol = mpmath.ldexp(1, -work // 2)
        real = sorted(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < tol)
        if E.discriminant > 0:
            e3, e2, e1 = real
            w1 = mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2))
            y = mpmath.pi / mpmath.agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3))
            omega_plus = 2 * w1
        else:
            e1 = real[-1]
            beta = mpmath.sqrt(3 * e1 * e1 + b2 * e1 / 2 + mpmath.mpf(b4) / 2)
            alpha = 3 * e1 + mpmath.mpf(b2) / 4
            w1 = 2 * mpmath.pi / mpmath.agm(2 * mpmath.sqrt(beta), mpmath.sqrt(2 * beta + alpha))
            y = mpmath.pi / mpmath.agm(2 * mpmath.sqrt(beta), mpmath.sqrt(2 * beta - alpha))
            omega_plus = w1
        cov = w1 * y
        err = mpmath.ldexp(1, -bits) * 2
        return Periods(HPReal(omega_plus, err), HPReal(cov / omega_plus, err), HPReal(w1, err), HPReal(cov, err))


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------


def _division_polys(E: Curve, n: int) -> list[sympy.Poly]:
    """psi~_0 .. psi~_n in x (psi_k = psi~_k for odd k, psi_2 psi~_k for even k)."""
    x = sympy.Symbol("x")
    b2, b4, b6, b8 = E.b
    F = sympy.Poly(4 * x**3 + b2 * x**2 + 2 * b4 * x + b6, x)
    psi = [sympy.Poly(0, x), sympy.Poly(1, x), sympy.Poly(1, x),
           sympy.Poly(3 * x**4 + b2 * x**3 + 3 * b4 * x**2 + 3 * b6 * x + b8, x),
           sympy.Poly(2 * x**6 + b2 * x**5 + 5 * b4 * x**4 + 10 * b6 * x**3 + 10 * b8 * x**2
                      + (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6 * b6), x)]
    F2 = F * F
    while len(psi) <= n:
        k = len(psi)
        mm = k // 2
        if k % 2:
            if mm % 2 == 0:
                val = F2 * psi[mm + 2] * psi[mm] ** 3 - psi[mm - 1] * psi[mm + 1] ** 3
            else:
                val = psi[mm + 2] * psi[mm] ** 3 - F2 * psi[mm - 1] * psi[mm + 1] ** 3
        else:
            val = psi[mm] * (psi[mm + 2] * psi[mm - 1] ** 2 - psi[mm - 2] * psi[mm + 1] ** 2)
        psi.append(val)
    return psi


def _torsion_x_poly(E: Curve, n: int) -> sympy.Poly:
    x = sympy.Symbol("x")
    psi = _division_polys(E, n)[n]
    if n % 2 == 0:
        b2, b4, b6, _ = E.b
        psi = psi * sympy.Poly(4 * x**3 + b2 * x**2 + 2 * b4 * x + b6, x)
    return psi


def _good_split_primes(E: Curve, fld: str, tower: Tower | None, count: int) -> list[int]:
    """Primes q >= 5 of good reduction with a degree-one prime of ``fld`` above q."""
    out = []
    q = 5
    while len(out) < count:
        q = int(sympy.nextprime(q))
        if E.discriminant % q == 0:
            continue
        if fld == "Q" or tower is None:
            out.append(q)
            continue
        if tower.m * tower.p % q == 0:
            continue
        if fld == "K" and q % tower.p != 1:
            continue
        if fld == "L":
            if q % tower.p == 1 and pow(tower.m, (q - 1) // tower.p, q) != 1:
                continue
        out.append(q)
    return out


def _roots_in_field(g: sympy.Poly, fld: str, tower: Tower | None, n_primes: int = 40) -> int:
    """Number of roots in the field of an irreducible g in Q[x] (Chebotarev test)."""
    deg = g.degree()
    if deg == 1:
        return 1
    if fld == "Q" or tower is None:
        return 0
    p, m = tower.p, tower.m
    coeffs = [int(c) for c in g.all_coeffs()]
    disc = int(sympy.discriminant(g)) * coeffs[0]
    if fld == "K":
        if (p - 1) % deg:
            return 0
        tested = 0
        q = 1
        while tested < n_primes:
            q += p
            if not sympy.isprime(q) or disc % q == 0:
                continue
            if _poly_roots_mod(list(reversed(coeffs)), q) != deg:
                return 0
            tested += 1
        return deg
    if fld == "L":
        if deg != p:
            return 0
        tested = 0
        q = 2
        while tested < n_primes:
            q = int(sympy.nextprime(q))
            if disc % q == 0 or (m * p) % q == 0:
                continue
            mine = _poly_roots_mod(list(reversed(coeffs)), q)
            ref = _poly_roots_mod([-m] + [0] * (p - 1) + [1], q)
            if mine != ref:
                return 0
            tested += 1
        return 1
    raise ValueError(f"torsion over {fld} is not supported")


def _is_square_in(r: Fraction, fld: str, tower: Tower | None) -> bool:
    def rat_square(v: Fraction) -> bool:
        if v < 0:
            return False
        return math.isqrt(v.numerator) ** 2 == v.numerator and math.isqrt(v.denominator) ** 2 == v.denominator

    if rat_square(r):
        return True
    if fld == "K" and tower is not None:
        pstar = tower.p if tower.p % 4 == 1 else -tower.p
        return rat_square(r * pstar)
    return False


def _count_torsion_points(E: Curve, n: int, fld: str, tower: Tower | None) -> int:
    """#E(k)[n] for the field k, by factoring the n-division polynomial."""
    x, Y = sympy.symbols("x Y")
    b2, b4, b6, _ = E.b
    Fx = 4 * x**3 + b2 * x**2 + 2 * b4 * x + b6
    poly = _torsion_x_poly(E, n)
    total = 1
    for g, _mult in sympy.factor_list(poly.as_expr(), x)[1]:
        gp = sympy.Poly(g, x)
        if gp.degree() == 0:
            continue
        nroots = _roots_in_field(gp, fld, tower)
        if nroots == 0:
            continue
        if gp.degree() == 1:
            x0 = Fraction(int(-gp.all_coeffs()[1]), int(gp.all_coeffs()[0]))
            val = Fraction(4) * x0**3 + b2 * x0**2 + 2 * b4 * x0 + b6
            if val == 0:
                total += 1
            elif _is_square_in(val, fld, tower):
                total += 2
            continue
        # do the conjugate roots carry points?  factor Res_x(g, Y^2 - F(x))
        H = sympy.Poly(sympy.resultant(gp.as_expr(), Y**2 - Fx, x), Y)
        if H.eval(0) == 0:
            total += nroots
            continue
        found = False
        for h, _m in sympy.factor_list(H.as_expr(), Y)[1]:
            hp = sympy.Poly(h, Y)
            if hp.degree() == gp.degree() and _roots_in_field(hp, fld, tower):
                found = True
                break
        if found:
            total += 2 * nroots
    return total


@lru_cache(maxsize=256)
def _torsion_cached(ainvs: tuple[int, ...], fld: str, p: int | None, m: int | None) -> int:
    E = Curve(ainvs)
    tower = Tower(p, m) if p is not None and m is not None else None
    bound = 0
    for q in _good_split_primes(E, fld, tower, 12):
        bound = math.gcd(bound, E.count_points_naive(q))
    order = 1
    for ell, e in sympy.factorint(bound).items():
        # largest ell-power subgroup: grow until the count stops increasing
        size = 1
        for k in range(1, e + 1):
            cnt = _count_torsion_points(E, ell**k, fld, tower)
            if cnt == size:
                break
            size = cnt
        order *= size
    return order


def torsion_order(E: Curve, fld: str = "Q", tower: Tower | None = None) -> int:
    """Order of the torsion subgroup of E(k) for k in {Q, K, L}."""
    if fld not in ("Q", "K", "L"):
        raise ValueError("torsion is computed over Q, K or L")
    if fld == "Q":
        return _torsion_cached(E.ainvs, "Q", None, None)
    assert tower is not None
    return _torsion_cached(E.ainvs, fld, tower.p, tower.m)


# ---------------------------------------------------------------------------
# curve database and parsing
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def curve_table() -> dict[str, tuple[int, ...]]:
    """Bundled curves keyed by upper-case label."""
    text = resources.files("falsetate").joinpath("data/curves.csv").read_text()
    table = {}
    for row in csv.reader(line for line in text.splitlines() if line and not line.startswith("#")):
        if row[0] == "label":
            continue
        table[row[0].strip().upper()] = tuple(int(v) for v in row[1:6])
    return table


def parse_curve(spec: str) -> Curve:
    """Parse a label from the bundled table or a list "a1,a2,a3,a4,a6"."""
    text = spec.strip().replace("−", "-")
    if "," in text:
        parts = [s.strip() for s in text.strip("[]").split(",")]
        try:
            coeffs = [int(s) for s in parts]
        except ValueError as exc:
            raise ValueError(f"malformed curve coefficients: {spec!r}") from exc
        if len(coeffs) != 5:
            raise ValueError(f"need five coefficients, got {len(coeffs)}")
        return Curve(coeffs)
    key = text.upper()
    table = curve_table()
    if key not in table:
        raise ValueError(f"unknown curve label {spec!r}")
    return Curve(table[key], label=key)


def iter_curves(labels: Iterable[str]) -> Iterable[Curve]:
    for lab in labels:
        yield parse_curve(lab)


Callback = Callable[[int], Any]
