"""Numerical evaluation of L-functions with known functional equation.

An L-series here has Dirichlet coefficients a_n, conductor N, Gamma factor
gamma(s) = Gamma(s/2)^d Gamma((s+1)/2)^d and sign w, so that
Lambda(s) = (sqrt(N)/pi^d)^s gamma(s) L(s) satisfies
Lambda(s) = w Lambda*(2-s), where Lambda* belongs to the dual series.

With phi the inverse Mellin transform of gamma and G_s its incomplete
Mellin transform,

    Lambda(s) = sum a_n G_s(n pi^d / sqrt N) + w sum conj(a_n) G_(2-s)(n pi^d / sqrt N).

By the duplication formula gamma(s) = (2 sqrt(pi))^d 2^(-ds) Gamma(s)^d, so
every kernel is a Meijer G-function in the variable x = n (2 pi)^d / sqrt N:

    K(x) = G^{d,0}_{0,d}(x | 0,...,0)          (theta series, phi)
    W(x) = G^{d,0}_{0,d}(x | 0,1,...,1)        (value at s = 1)

with L(1) = sum (a_n + w conj(a_n)) W(n/A) / n and theta(t) = sum a_n K(n t/A),
A = sqrt(N)/(2 pi)^d, satisfying t^2 theta(t) = w theta*(1/t).

The kernels are tabulated once per d as piecewise Chebyshev interpolants
of log K and log W in the variable u = log x, validated against direct
evaluation, and cached on disk.  Series sums run in the compiled kernel.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Sequence

import mpmath
import numpy as np

from . import kernels
from .artin import ArtinRep, chi_value, twist_local_poly
from .elliptic import Curve, frobenius_traces, local_poly_Q
from .fieldtower import UnsupportedError
from .numerics import DEFAULT_BITS, SAFETY, HPComplex, HPReal, primes_upto

log = logging.getLogger(__name__)

TABLE_VERSION = 3
LOG_FLOOR = -80.0  # kernel values below e^-80 are dropped from sums


class InsufficientBudget(UnsupportedError):
    """The coefficient budget cannot reach the requested accuracy."""

    def __init__(self, message: str, required: int) -> None:
        super().__init__(message)
        self.required = required


class IndeterminateSign(ArithmeticError):
    """Neither sign satisfies the functional equation with enough margin."""


class InsufficientPrecision(ArithmeticError):
    """Rational recognition is impossible at the available precision."""


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


def _kernel_mp(which: str, d: int, x: Any) -> mpmath.mpf:
    """Direct evaluation of K (which='K') or W (which='W') at x > 0."""
    x = mpmath.mpf(x)
    if d == 1:
        return mpmath.exp(-x)
    if d == 2:
        r = 2 * mpmath.sqrt(x)
        return 2 * mpmath.besselk(0, r) if which == "K" else r * mpmath.besselk(1, r)
    b = [0] * d if which == "K" else [0] + [1] * (d - 1)
    return mpmath.meijerg([[], []], [b, []], x)


def _cache_dir() -> Path | None:
    root = os.environ.get("FALSETATE_CACHE")
    path = Path(root) if root else Path.home() / ".cache" / "falsetate"
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    return path if os.access(path, os.W_OK) else None


@dataclass(frozen=True)
class KernelTable:
    """Piecewise Chebyshev interpolant of log F(e^u) on [u0, u0 + h * nint]."""

    u0: float
    h: float
    cheb: np.ndarray
    max_error: float  # largest |log F| interpolation error seen at validation points

    @property
    def u_max(self) -> float:
        return self.u0 + self.h * self.cheb.shape[0]

    def log_value(self, x: float) -> float:
        u = math.log(x)
        if u >= self.u_max:
            return -math.inf
        u = max(u, self.u0)
        k = min(int((u - self.u0) / self.h), self.cheb.shape[0] - 1)
        t = 2.0 * (u - self.u0 - k * self.h) / self.h - 1.0
        return float(np.polynomial.chebyshev.chebval(t, self.cheb[k]))

    def value(self, x: float) -> float:
        return math.exp(self.log_value(x))


def _fit_table(f: Callable[[mpmath.mpf], mpmath.mpf], u0: float, h: float, deg: int,
               floor: float) -> KernelTable:
    """Build intervals from u0 upward until log f drops below ``floor``."""
    nodes = np.cos(np.pi * (np.arange(deg) + 0.5) / deg)
    rows: list[np.ndarray] = []
    err = 0.0
    k = 0
    while True:
        a = u0 + k * h
        us = a + (nodes + 1.0) * h / 2.0
        vals = np.array([float(mpmath.log(f(mpmath.exp(u)))) for u in us])
        coeffs = np.polynomial.chebyshev.chebfit(nodes, vals, deg - 1)
        # validate between nodes
        for tv in (-0.97, 0.03, 0.61):
            exact = float(mpmath.log(f(mpmath.exp(a + (tv + 1.0) * h / 2.0))))
            approx = float(np.polynomial.chebyshev.chebval(tv, coeffs))
            err = max(err, abs(exact - approx))
        rows.append(coeffs)
        k += 1
        if vals.max() < floor:
            break
        if k > 4000:  # pragma: no cover - defensive
            raise RuntimeError("kernel table does not decay")
    return KernelTable(u0, h, np.ascontiguousarray(np.array(rows)), err)


@lru_cache(maxsize=None)
def kernel_table(which: str, d: int, tag: str = "") -> KernelTable:
    """Cached table for K or W in dimension d (``tag`` selects G_s tables)."""
    u0, h, deg = math.log(1e-12), 0.5, 16
    key = f"v{TABLE_VERSION}-{which}-{d}-{tag}-{u0:.6f}-{h}-{deg}"
    cache = _cache_dir()
    fname = None
    if cache is not None:
        fname = cache / f"kernel-{hashlib.sha1(key.encode()).hexdigest()[:16]}.npz"
        if fname.exists():
            try:
                data = np.load(fname)
                if str(data["key"]) == key:
                    return KernelTable(float(data["u0"]), float(data["h"]), data["cheb"],
                                       float(data["err"]))
            except (OSError, KeyError, ValueError):
                pass
    with mpmath.workdps(30):
        if which in ("K", "W"):
            table = _fit_table(lambda x: _kernel_mp(which, d, x), u0, h, deg, LOG_FLOOR - 5)
        else:
            s = mpmath.mpf(tag)
            table = _fit_table(lambda x: _G_scaled(d, s, x), u0, h, deg, LOG_FLOOR - 5)
    if table.max_error > 1e-11:
        raise ArithmeticError(f"kernel table {key} failed validation ({table.max_error:.2e})")
    if fname is not None:
        tmp = fname.with_suffix(".tmp.npz")
        np.savez(tmp, key=key, u0=table.u0, h=table.h, cheb=table.cheb, err=table.max_error)
        os.replace(tmp, fname)
    return table


def _G_scaled(d: int, s: mpmath.mpf, x: mpmath.mpf) -> mpmath.mpf:
    """G_s evaluated at t = x / 2^d (so that x = n (2 pi)^d / sqrt N)."""
    return G_mp(d, s, x / mpmath.mpf(2) ** d)


def phi_mp(d: int, t: Any) -> mpmath.mpf:
    return (2 * mpmath.sqrt(mpmath.pi)) ** d * _kernel_mp("K", d, mpmath.mpf(2) ** d * t)


def G_mp(d: int, s: Any, t: Any) -> Any:
    """t^-s int_t^oo phi(x) x^s dx/x as a Meijer G-function."""
    t = mpmath.mpf(t)
    z = mpmath.mpf(2) ** d * t
    pref = (2 * mpmath.sqrt(mpmath.pi)) ** d * z ** (-s)
    if d == 1:
        # (2 sqrt(pi)) (2t)^-s Gamma(s, 2t)
        return pref * mpmath.gammainc(s, z)
    return pref * mpmath.meijerg([[], [1]], [[s] * d + [0], []], z)


@dataclass(frozen=True)
class GammaKernel:
    """The Gamma factor Gamma(s/2)^d Gamma((s+1)/2)^d and its transforms."""

    d: int
    bits: int = DEFAULT_BITS

    def gamma_factor(self, s: Any) -> Any:
        with mpmath.workprec(self.bits + 20):
            s = mpmath.mpmathify(s)
            return mpmath.gamma(s / 2) ** self.d * mpmath.gamma((s + 1) / 2) ** self.d

    def phi(self, t: Any) -> HPReal:
        """Inverse Mellin transform of the Gamma factor at t > 0."""
        t = t.mid if isinstance(t, HPReal) else t
        if t <= 0:
            raise ValueError("phi needs t > 0")
        with mpmath.workprec(self.bits + 30):
            v = phi_mp(self.d, t)
        return HPReal(v, SAFETY * abs(v) * mpmath.ldexp(1, -self.bits))

    def G(self, s: Any, t: Any) -> HPComplex:
        """Incomplete Mellin transform G_s(t) at t > 0."""
        s = s.mid if isinstance(s, (HPReal, HPComplex)) else s
        t = t.mid if isinstance(t, HPReal) else t
        if t <= 0:
            raise ValueError("G needs t > 0")
        with mpmath.workprec(self.bits + 30):
            v = G_mp(self.d, s, t)
        return HPComplex(v, SAFETY * abs(v) * mpmath.ldexp(1, -self.bits))

    def table(self, which: str) -> KernelTable:
        return kernel_table(which, self.d)


# ---------------------------------------------------------------------------
# L-series
# ---------------------------------------------------------------------------


def inverse_series(P: Sequence[int], K: int) -> list[int]:
    """Coefficients c_0..c_(K-1) of 1/P(T) for integer P with P(0) = 1."""
    c = [0] * K
    c[0] = 1
    for k in range(1, K):
        acc = 0
        for j in range(1, min(k, len(P) - 1) + 1):
            acc -= P[j] * c[k - j]
        c[k] = acc
    return c


@dataclass
class LSeries:
    """An L-series with integer Dirichlet coefficients.

    ``local_poly(q)`` gives P_q exactly.  ``linear(primes)`` gives, for an
    array of primes, the coefficient of T in 1/P_q (used for primes beyond
    sqrt(M) where higher terms are irrelevant); ``support(primes)`` marks
    the primes whose linear coefficient can be non-zero.
    """

    name: str
    conductor: int
    d: int
    local_poly: Callable[[int], tuple[int, ...]]
    linear: Callable[[np.ndarray], np.ndarray]
    bad_primes: tuple[int, ...]
    sign: int | None = None
    _cache: dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def scale(self) -> float:
        """A = sqrt(N) / (2 pi)^d."""
        return math.sqrt(self.conductor) / (2 * math.pi) ** self.d

    def default_budget(self) -> int:
        """Smallest M with M pi^d / sqrt(N) >= 40 d."""
        return max(50, math.ceil(40 * self.d * math.sqrt(self.conductor) / math.pi**self.d))

    # coefficients -------------------------------------------------------------
    def coefficients(self, M: int) -> np.ndarray:
        """a_0..a_M as int64 (a_0 = 0)."""
        cached = self._cache.get("coeffs")
        if cached is not None and len(cached) - 1 >= M:
            return cached[: M + 1]
        root = math.isqrt(M)
        primes = primes_upto(M)
        small_mask = primes <= root
        for q in self.bad_primes:
            small_mask |= primes == q
        small = primes[small_mask]
        K = max(2, int(math.log(M) / math.log(2)) + 2)
        series = np.zeros((len(small), K), dtype=np.int64)
        for i, q in enumerate(small.tolist()):
            P = self.local_poly(q)
            kq = 1
            while q ** kq <= M:
                kq += 1
            series[i, :kq] = inverse_series(P, kq)
            series[i, kq:] = 0
        large = primes[~small_mask]
        lin = self.linear(large).astype(np.int64)
        keep = lin != 1
        a = kernels.build_coeffs(M, small.astype(np.int64), series, large[keep].astype(np.int64),
                                 lin[keep])
        self._cache["coeffs"] = a
        return a

    def coefficient_list(self, M: int) -> list[int]:
        return [int(x) for x in self.coefficients(M)[1:]]


def _rep_trace(tau: ArtinRep, primes: np.ndarray) -> np.ndarray:
    """Trace of Frob_q on tau for primes q prime to mp (vectorized)."""
    p, m = tau.p, tau.tower.m
    out = np.zeros(len(primes), dtype=np.int64)
    if tau.kind == "trivial":
        out[:] = 1
        return out
    one = primes % p == 1
    if tau.kind == "sigma":
        out[one] = p - 1
        return out
    idx = np.nonzero(one)[0]
    for i in idx.tolist():
        q = int(primes[i])
        out[i] = p - 1 if pow(m % q, (q - 1) // p, q) == 1 else -1
    return out


def _twist_parts(E: Curve, tau: ArtinRep) -> tuple[Any, Any, tuple[int, ...], int, str]:
    bad = tuple(sorted(set(E.bad_primes) | {q for q in _factor(tau.conductor)}))

    def local(q: int) -> tuple[int, ...]:
        return tuple(int(c) for c in twist_local_poly(E, tau, q))

    def linear(primes: np.ndarray) -> np.ndarray:
        tr = _rep_trace(tau, primes)
        out = np.zeros(len(primes), dtype=np.int64)
        nz = np.nonzero(tr)[0]
        if len(nz):
            out[nz] = frobenius_traces(E, primes[nz]) * tr[nz]
        return out

    d = tau.dimension if tau.kind != "trivial" else 1
    curve = E.label or list(E.ainvs)
    name = f"L({curve}, {tau.label()})" if tau.kind != "trivial" else f"L({curve})"
    return local, linear, bad, d, name


def twist_series(E: Curve, tau: ArtinRep, sign: int | None = None) -> LSeries:
    """L(E, tau, s) for tau in {trivial, sigma, rho}."""
    from .artin import twist_conductor

    N = twist_conductor(E, tau)
    local, linear, bad, d, name = _twist_parts(E, tau)
    return LSeries(name, N, d, local, linear, bad, sign)


@dataclass(frozen=True)
class ResolvedTwist:
    """A twist whose data at additive ramified primes was fixed numerically."""

    series: LSeries
    exponents: dict[int, int]
    residual: float
    runner_up: float


def resolve_additive_twist(E: Curve, tau: ArtinRep, t: float = 1.1, margin: float = 1e3,
                           max_exponent: int | None = None) -> ResolvedTwist:
    """L(E, tau, s) when tau is ramified at a prime of additive reduction.

    The Euler factor at such a prime q is taken to be 1 (no inertia
    invariants) and the conductor exponent f_q together with the sign are
    chosen by the theta functional equation: every pair (f_q, sign) is
    tried and the unique best residual must beat all others by ``margin``.
    """
    from .artin import twist_conductor_exponent

    exps: dict[int, int] = {}
    unknown: list[int] = []
    for q in sorted(set(E.bad_primes) | set(_factor(tau.conductor))):
        try:
            exps[q] = twist_conductor_exponent(E, tau, q)
        except UnsupportedError:
            unknown.append(q)
    if not unknown:
        raise ValueError("no additive ramified prime: use twist_series")
    if len(unknown) > 1:
        raise UnsupportedError("unsupported: more than one additive ramified prime")
    q0 = unknown[0]
    dim = tau.dimension
    top = max_exponent or 2 * dim + dim * (8 if q0 == 2 else 5 if q0 == 3 else 0) // 2
    base_local, linear, bad, _, name = _twist_parts(E, tau)

    def local(q: int) -> tuple[int, ...]:
        return (1,) if q == q0 else base_local(q)

    def build(f: int, sign: int | None) -> LSeries:
        N = q0**f
        for q, e in exps.items():
            N *= q**e
        return LSeries(name, N, dim, local, linear, bad, sign)

    big = build(top, None)
    M = math.ceil(big.default_budget() * 1.05)
    shared = big.coefficients(M)
    results = []
    for f in range(dim, top + 1):
        S = build(f, None)
        S._cache["coeffs"] = shared
        lhs, rhs = _theta_pair(S, t, min(M, math.ceil(S.default_budget() * 1.05)))
        for sgn in (1, -1):
            results.append((_residual(lhs, rhs, sgn), f, sgn))
    results.sort()
    (best, f, sgn), (second, _, _) = results[0], results[1]
    if second < margin * best:
        raise IndeterminateSign(f"cannot pin the conductor at {q0}: residuals {best:.2e} and {second:.2e}")
    S = build(f, sgn)
    S._cache["coeffs"] = shared
    exps[q0] = f
    return ResolvedTwist(S, exps, best, second)


def curve_series(E: Curve, sign: int | None = None) -> LSeries:
    def linear(primes: np.ndarray) -> np.ndarray:
        return frobenius_traces(E, primes)

    def local(q: int) -> tuple[int, ...]:
        return tuple(int(c) for c in local_poly_Q(E, q))

    return LSeries(f"L({E.label or list(E.ainvs)})", E.conductor, 1, local, linear,
                   tuple(E.bad_primes), sign)


def _factor(n: int) -> list[int]:
    import sympy

    return sorted(sympy.factorint(n))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LValue:
    """L(s) with an error estimate and the bookkeeping behind it."""

    value: HPReal
    budget: int
    tail_estimate: float
    abs_sum: float
    sign: int

    def __float__(self) -> float:
        return float(self.value.mid)


def _series_sum(a: np.ndarray, scale: float, power: int, table: KernelTable) -> tuple[float, float]:
    return kernels.kernel_sum(a, scale, power, table.u0, table.h, table.cheb, LOG_FLOOR)


def _tail_estimate(a: np.ndarray, A: float, table: KernelTable, power: int) -> float:
    """Absolute-value estimate of the terms beyond the budget.

    Uses the empirical size R = mean |a_n| / sqrt(n) over the last half of
    the coefficients and integrates R n^(1/2 - power) F(n/A) from M to oo.
    """
    M = len(a) - 1
    lo = M // 2 + 1
    n = np.arange(lo, M + 1, dtype=np.float64)
    R = float(np.mean(np.abs(a[lo:]).astype(np.float64) / np.sqrt(n))) if M >= 2 else 1.0
    R = max(R, 1e-300)
    total = 0.0
    x = M / A
    # integrate in u = log(n) with geometric steps until the kernel is negligible
    step = 1.01
    while True:
        lv = table.log_value(x)
        if lv < LOG_FLOOR:
            break
        nn = x * A
        total += R * nn ** (0.5 - power) * math.exp(lv) * nn * (step - 1.0)
        x *= step
    return total


def required_budget(S: LSeries, target: float, which: str = "W") -> int:
    """Heuristic budget whose tail estimate is below ``target``."""
    table = kernel_table(which, S.d)
    A = S.scale
    # assume |a_n| ~ sqrt(n) log(n)^(d) on average
    M = max(100, int(A))
    while M < 10**11:
        x = M / A
        lv = table.log_value(x)
        if lv < LOG_FLOOR:
            return M
        est = math.sqrt(M) * math.exp(lv) * A * x * 3
        if est < target:
            return M
        M = int(M * 1.2) + 1
    return M


def l_value(S: LSeries, s: Any = 1, budget: int | None = None, target: float = 1e-10,
            strict: bool = True) -> LValue:
    """L(S, s) for self-dual S with known sign (s = 1 or real s)."""
    if S.sign is None:
        raise ValueError("the sign of the functional equation must be known")
    M = budget or S.default_budget()
    a = S.coefficients(M)
    if s == 1:
        table = kernel_table("W", S.d)
        total, sabs = _series_sum(a, 1.0 / S.scale, 1, table)
        value = (1 + S.sign) * total
        tail = 2 * _tail_estimate(a, S.scale, table, 1)
        err = tail + 2 * sabs * (abs(table.max_error) + 1e-15 * math.log2(M + 2))
    else:
        sv = float(s)
        t1 = kernel_table("G", S.d, repr(sv))
        t2 = kernel_table("G", S.d, repr(2.0 - sv))
        s1, abs1 = _series_sum(a, 1.0 / S.scale, 0, t1)
        s2, abs2 = _series_sum(a, 1.0 / S.scale, 0, t2)
        lam = s1 + S.sign * s2
        with mpmath.workprec(80):
            Api = mpmath.sqrt(S.conductor) / mpmath.pi**S.d
            norm = float(Api**sv * GammaKernel(S.d).gamma_factor(sv))
        value = lam / norm
        tail = (_tail_estimate(a, S.scale, t1, 0) + _tail_estimate(a, S.scale, t2, 0)) / norm
        err = tail + (abs1 + abs2) * (t1.max_error + t2.max_error + 1e-15 * math.log2(M + 2)) / norm
    if strict and tail > target:
        need = required_budget(S, target)
        raise InsufficientBudget(
            f"budget {M} leaves an estimated tail of {tail:.2e} > {target:.1e}; "
            f"about {need} coefficients are required", need)
    return LValue(HPReal(value, err), M, tail, float(sabs if s == 1 else abs1 + abs2), S.sign)


def theta(S: LSeries, t: float, M: int | None = None) -> tuple[float, float]:
    """theta(t) = sum a_n K(n t / A) and the sum of absolute values."""
    M = M or S.default_budget()
    a = S.coefficients(M)
    return _series_sum(a, t / S.scale, 0, kernel_table("K", S.d))


def _theta_pair(S: LSeries, t: float, M: int | None) -> tuple[float, float]:
    return t * t * theta(S, t, M)[0], theta(S, 1.0 / t, M)[0]


def _residual(lhs: float, rhs: float, sign: int) -> float:
    denom = max(abs(lhs), abs(rhs))
    return abs(lhs - sign * rhs) / denom if denom else math.inf


def fe_residual(S: LSeries, t: float, sign: int, M: int | None = None) -> float:
    """|t^2 theta(t) - sign theta(1/t)| / max(|t^2 theta(t)|, |theta(1/t)|)."""
    return _residual(*_theta_pair(S, t, M), sign)


@dataclass(frozen=True)
class SignReport:
    sign: int
    residual: float
    other_residual: float

    @property
    def separation(self) -> float:
        return self.other_residual / max(self.residual, 1e-300)


def numeric_sign(S: LSeries, t: float = 1.1, M: int | None = None, margin: float = 1e3) -> SignReport:
    """The sign minimizing the theta residual, required to win by ``margin``."""
    lhs, rhs = _theta_pair(S, t, M)
    rp, rm = _residual(lhs, rhs, 1), _residual(lhs, rhs, -1)
    best, worst, sgn = (rp, rm, 1) if rp <= rm else (rm, rp, -1)
    if worst < margin * best:
        raise IndeterminateSign(f"indeterminate sign: residuals {rp:.2e} (+1) and {rm:.2e} (-1)")
    return SignReport(sgn, best, worst)


# ---------------------------------------------------------------------------
# twists by single Dirichlet characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterTwistValue:
    value: HPComplex
    root_number: complex
    budget: int


def character_twist_value(E: Curve, chi: ArtinRep, budget: int | None = None,
                          target: float = 1e-11) -> CharacterTwistValue:
    """L(E tensor chi, 1) for a Dirichlet character chi modulo p (E good at p).

    The coefficients are a_n(E) chi(n); the dual series has conj(chi).  The
    root number is found numerically from theta(t) t^2 = w theta*(1/t), and the
    value is sum a_n chi(n) W(n/A)/n + w sum a_n conj(chi(n)) W(n/A)/n.
    """
    p = chi.p
    base = curve_series(E)
    if chi.is_trivial_character:
        w = _curve_sign(E)
        base.sign = w
        val = l_value(base, 1, budget, target)
        return CharacterTwistValue(HPComplex(val.value.mid, val.value.err), complex(w), val.budget)
    if E.conductor % p == 0:
        raise UnsupportedError("character twists need good reduction at p")
    N = E.conductor * p * p
    A = math.sqrt(N) / (2 * math.pi)
    M = budget or max(60, math.ceil(40 * math.sqrt(N) / math.pi))
    a = base.coefficients(int(M * 1.2))
    n = np.arange(len(a))
    # residue-class sums S_r = sum_{n = r mod p} a_n F(n scale)/n^power
    def class_sums(which: str, scale: float, power: int, upto: int) -> list[float]:
        table = kernel_table(which, 1)
        out = []
        for r in range(p):
            ar = np.where(n[: upto + 1] % p == r, a[: upto + 1], 0).astype(np.int64)
            out.append(_series_sum(ar, scale, power, table)[0])
        return out

    def combine(sums: list[float], conj: bool) -> complex:
        total = 0j
        for r in range(1, p):
            c = complex(chi_value(chi, r))
            total += (c.conjugate() if conj else c) * sums[r]
        return total

    t = 1.1
    th_t = combine(class_sums("K", t / A, 0, int(M * 1.2)), False)
    th_inv = combine(class_sums("K", 1 / (t * A), 0, int(M * 1.2)), True)
    w = t * t * th_t / th_inv
    if abs(abs(w) - 1) > 1e-6:
        raise IndeterminateSign(f"numerical root number {w} is not on the unit circle")
    wsums = class_sums("W", 1 / A, 1, M)
    value = combine(wsums, False) + w * combine(wsums, True)
    table = kernel_table("W", 1)
    err = 4 * _tail_estimate(a[: M + 1], A, table, 1) + 1e-13 * (1 + abs(value))
    return CharacterTwistValue(HPComplex(mpmath.mpc(value), err), w, M)


def _curve_sign(E: Curve) -> int:
    from .artin import root_number_semistable

    if E.is_semistable():
        return root_number_semistable(E)
    return numeric_sign(curve_series(E)).sign


def curve_root_number(E: Curve) -> int:
    """Root number of E/Q (from local data if semistable, else numerically)."""
    return _curve_sign(E)


# ---------------------------------------------------------------------------
# exact coefficients for small M (cyclotomic coefficients allowed)
# ---------------------------------------------------------------------------


def exact_coefficients(local_poly: Callable[[int], Sequence[Any]], M: int) -> list[Any]:
    """a_1..a_M of prod_q 1/P_q with exact (int or CycloNumber) coefficients."""
    import sympy

    a: list[Any] = [0] * (M + 1)
    a[1] = 1
    series: dict[int, list[Any]] = {}
    for q in sympy.primerange(2, M + 1):
        P = list(local_poly(q))
        K = 1
        while q**K <= M:
            K += 1
        c: list[Any] = [1] + [0] * (K - 1)
        for k in range(1, K):
            acc: Any = 0
            for j in range(1, min(k, len(P) - 1) + 1):
                acc = acc - P[j] * c[k - j]
            c[k] = acc
        series[q] = c
    for n in range(2, M + 1):
        value: Any = 1
        for q, e in sympy.factorint(n).items():
            value = value * series[q][e]
        a[n] = value
    return a[1:]


# ---------------------------------------------------------------------------
# rational recognition
# ---------------------------------------------------------------------------


def recognize_rational(x: HPReal | float, denom_bound: int, err: float | None = None) -> Fraction:
    """The unique rational with denominator <= denom_bound inside the error interval."""
    mid = float(x.mid) if isinstance(x, HPReal) else float(x)
    e = float(x.err) if isinstance(x, HPReal) and err is None else float(err or 0.0)
    if e * denom_bound**2 >= 0.5:
        raise InsufficientPrecision(f"insufficient precision: error {e:.2e} too large for denominators <= {denom_bound}")
    found = set()
    for q in range(1, denom_bound + 1):
        num = round(mid * q)
        cand = Fraction(num, q)
        if abs(mid - float(cand)) <= e:
            found.add(cand)
    if len(found) != 1:
        raise InsufficientPrecision(f"insufficient precision: {len(found)} rational candidates near {mid}")
    return found.pop()


__all__ = [
    "GammaKernel",
    "IndeterminateSign",
    "InsufficientBudget",
    "InsufficientPrecision",
    "LSeries",
    "LValue",
    "character_twist_value",
    "curve_root_number",
    "curve_series",
    "exact_coefficients",
    "fe_residual",
    "inverse_series",
    "kernel_table",
    "l_value",
    "numeric_sign",
    "recognize_rational",
    "resolve_additive_twist",
    "ResolvedTwist",
    "theta",
    "twist_series",
]
