"""Birch and Swinnerton-Dyer quotients and the p-adic values L_E(sigma), L_E(rho).

For a self-dual tau in {sigma, rho} and E good ordinary at p,

    L_E(tau) = L_{v not | mp}(E, tau, 1) / (Omega_+^{d+} Omega_-^{d-})
               * eps_p(tau) * P_p(tau, u^-1) / P_p(tau, w^-1) * u^(-n(tau)).

With Omega_- = i |Omega_-| and the normalized algebraic value

    L*(E, tau) = |L(E, tau, 1) sqrt(N(tau))| / (Omega_+^{d+} |2 Omega_-|^{d-}),

this becomes

    L_E(tau) = sign(L) L*(E, tau) (-2i)^{d-} prod_{q | mp} P_q(E, tau, 1/q)
               * eps_p(tau) / sqrt(N(tau)) * P_p(tau, u^-1) / P_p(tau, w^-1) * u^(-n(tau)),

where every factor but the last two is rational once eps_p(tau) / sqrt(N(tau))
is combined with (-2i)^{d-}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import sympy

from .artin import ArtinRep, local_poly_rep, poly_eval, rho, sigma, sign, twist_local_poly
from .elliptic import (
    Curve,
    ap,
    local_data_over,
    model_correction,
    periods,
    points_over,
    tamagawa_product,
    torsion_order,
)
from .epsilon import EpsilonFactor, eps_rho, eps_sigma
from .fieldtower import Tower, UnsupportedError
from .lseries import (
    InsufficientPrecision,
    LSeries,
    LValue,
    curve_root_number,
    curve_series,
    l_value,
    recognize_rational,
    resolve_additive_twist,
    twist_series,
)
from .numerics import CycloNumber, HPReal, PadicNumber, hensel_roots, ord_p

#: |L| below this multiple of its error bound is treated as a vanishing value.
VANISHING_FACTOR = 1e3
#: Default accuracy target for twisted L-values.
DEFAULT_TARGET = 1e-8


# ---------------------------------------------------------------------------
# L-values with caching
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistData:
    """A twisted L-series together with the way its sign and conductor were found."""

    series: LSeries
    sign_source: str  # "formula" or "numeric"
    flags: tuple[str, ...] = ()


_SERIES_CACHE: dict[tuple[Any, ...], TwistData] = {}
_VALUE_CACHE: dict[tuple[Any, ...], LValue] = {}


def _rep_key(tau: ArtinRep | None) -> tuple[Any, ...]:
    if tau is None:
        return ("trivial",)
    return (tau.kind, tau.index, tau.p, tau.tower.m)


def twist_data(E: Curve, tau: ArtinRep | None) -> TwistData:
    """The L-series of E (tau = None) or of E twisted by tau, with its sign."""
    key = (E.ainvs,) + _rep_key(tau)
    if key in _SERIES_CACHE:
        return _SERIES_CACHE[key]
    if tau is None:
        data = TwistData(curve_series(E, curve_root_number(E)),
                         "formula" if E.is_semistable() else "numeric")
    else:
        w_E = None if E.is_semistable() else curve_root_number(E)
        try:
            data = TwistData(twist_series(E, tau, sign(E, tau, w_E)), "formula")
        except UnsupportedError:
            resolved = resolve_additive_twist(E, tau)
            data = TwistData(resolved.series, "numeric", ("conductor at additive ramified prime fixed numerically",))
    _SERIES_CACHE[key] = data
    return data


def twisted_l_value(E: Curve, tau: ArtinRep | None, budget: int | None = None,
                    target: float = DEFAULT_TARGET) -> LValue:
    key = (E.ainvs,) + _rep_key(tau) + (budget, target)
    if key not in _VALUE_CACHE:
        _VALUE_CACHE[key] = l_value(twist_data(E, tau).series, budget=budget, target=target)
    return _VALUE_CACHE[key]


def clear_caches() -> None:
    _SERIES_CACHE.clear()
    _VALUE_CACHE.clear()


def is_vanishing(value: HPReal) -> bool:
    return abs(float(value.mid)) < VANISHING_FACTOR * float(value.err)


def denominator_bound(err: float, cap: int = 10**4) -> int:
    """Largest denominator bound for which rational recognition is meaningful."""
    if err <= 0:
        return cap
    return max(1, min(cap, int(math.sqrt(0.25 / err))))


# ---------------------------------------------------------------------------
# BSD quotients
# ---------------------------------------------------------------------------


def _sqrt_int(n: int) -> HPReal:
    r = math.isqrt(n)
    if r * r == n:
        return HPReal(r)
    return HPReal(n).sqrt()


@dataclass
class BsdReport:
    """Analytic order of Sha over a field in {Q, K, L}."""

    field: str
    l_value: HPReal
    quotient: HPReal  # L* before torsion, Tamagawa and model corrections
    l_star: Fraction | None
    sha: Fraction | None
    sha_real: HPReal | None
    inputs: dict[str, Any] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    @property
    def rank_positive(self) -> bool:
        return "rank > 0, Sha undefined" in self.flags

    @property
    def verified(self) -> bool:
        return "verified-precision" in self.flags


def _field_data(E: Curve, fld: str, tower: Tower | None, budget: int | None,
                target: float) -> tuple[HPReal, int, int, HPReal, list[str]]:
    """L(E/k, 1), d+, d-, sqrt|disc k| and flags."""
    flags: list[str] = []
    LE = twisted_l_value(E, None, budget, target).value
    if fld == "Q":
        return LE, 1, 0, HPReal(1), flags
    if tower is None:
        raise ValueError("a tower is needed over K and L")
    p = tower.p
    half = (p - 1) // 2
    if fld == "K":
        tau = sigma(tower)
        flags += list(twist_data(E, tau).flags)
        return twisted_l_value(E, tau, budget, target).value, half, half, _sqrt_int(tower.N_sigma), flags
    if fld == "L":
        tau = rho(tower)
        flags += list(twist_data(E, tau).flags)
        Lr = twisted_l_value(E, tau, budget, target).value
        return LE * Lr, half + 1, half, _sqrt_int(tower.N_rho), flags
    raise UnsupportedError(f"unsupported field {fld!r}")


def bsd_quotient(E: Curve, fld: str = "Q", tower: Tower | None = None, budget: int | None = None,
                 target: float = DEFAULT_TARGET, tamagawa_override: int | None = None) -> BsdReport:
    """L*(E/k) and the analytic order of Sha(E/k) for k in {Q, K, L}."""
    L, dp, dm, sqrt_disc, flags = _field_data(E, fld, tower, budget, target)
    P = periods(E)
    denom = P.Omega_plus**dp * (P.Omega_minus_im * 2) ** dm
    quotient = abs(L) * sqrt_disc / denom
    tors = torsion_order(E, fld, tower)
    tam = tamagawa_override or tamagawa_product(E, fld, tower)
    corr = model_correction(E, fld, tower)
    inputs = {
        "Omega_plus": float(P.Omega_plus.mid),
        "Omega_minus_im": float(P.Omega_minus_im.mid),
        "torsion": tors,
        "tamagawa": tam,
        "model_correction": corr.norm,
        "sqrt_disc": float(sqrt_disc.mid),
    }
    if fld != "Q" and tower is not None:
        for q in E.bad_primes:
            for ld in local_data_over(E, fld, q, tower):
                flags.extend(f for f in ld.flags if f not in flags)
    if is_vanishing(L):
        flags.append("rank > 0, Sha undefined")
        return BsdReport(fld, L, quotient, Fraction(0), None, None, inputs, flags)
    sha_real = quotient * tors**2 / (tam * corr.norm)
    err = float(sha_real.err)
    l_star = sha = None
    try:
        sha = recognize_rational(sha_real, denominator_bound(err, 64))
        l_star = sha * tam * corr.norm / tors**2
    except InsufficientPrecision:
        flags.append("insufficient precision for recognition")
    if sha is not None and sha.denominator == 1 and math.isqrt(sha.numerator) ** 2 == sha.numerator:
        flags.append("verified-precision")
    return BsdReport(fld, L, quotient, l_star, sha, sha_real, inputs, flags)


# ---------------------------------------------------------------------------
# p-adic L-values
# ---------------------------------------------------------------------------


@dataclass
class CurlyLValue:
    """L_E(tau) as a p-adic number with the factors it was assembled from."""

    tau: str
    value: PadicNumber
    l_star: Fraction
    trace: list[tuple[str, str, int | float]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def vanishes(self) -> bool:
        return "L-value vanishes" in self.flags

    def valuation(self) -> int | float:
        return math.inf if self.value.is_zero() else self.value.valuation()


def unit_root(E: Curve, p: int, prec: int) -> tuple[PadicNumber, PadicNumber]:
    """(u, w) with P_p(E, T) = (1 - uT)(1 - wT) and u a p-adic unit."""
    if E.conductor % p == 0:
        raise UnsupportedError(f"unsupported: E has bad reduction at p={p}")
    return hensel_roots(ap(E, p), p, prec)


def _rep_for(kind: str, tower: Tower) -> ArtinRep:
    if kind == "sigma":
        return sigma(tower)
    if kind == "rho":
        return rho(tower)
    raise UnsupportedError(f"unsupported representation {kind!r}")


def _eps(kind: str, tower: Tower) -> EpsilonFactor:
    return eps_sigma(tower) if kind == "sigma" else eps_rho(tower)


def _record(trace: list[tuple[str, str, int | float]], name: str, x: Any, p: int) -> None:
    if isinstance(x, PadicNumber):
        v: int | float = math.inf if x.is_zero() else x.valuation()
    else:
        v = ord_p(Fraction(x), p)
    trace.append((name, str(x), v))


def l_star(E: Curve, tau: ArtinRep, budget: int | None = None,
           target: float = DEFAULT_TARGET) -> tuple[Fraction, int, HPReal]:
    """(L*(E, tau), sign of L(E, tau, 1), L(E, tau, 1))."""
    L = twisted_l_value(E, tau, budget, target).value
    if is_vanishing(L):
        return Fraction(0), 0, L
    P = periods(E)
    denom = P.Omega_plus**tau.d_plus * (P.Omega_minus_im * 2) ** tau.d_minus
    x = abs(L) * _sqrt_int(tau.conductor) / denom
    value = recognize_rational(x, denominator_bound(float(x.err)))
    return value, (1 if float(L.mid) > 0 else -1), L


def curly_l(E: Curve, kind: str, tower: Tower, prec: int = 4, budget: int | None = None,
            target: float = DEFAULT_TARGET) -> CurlyLValue:
    """L_E(tau) to absolute precision O(p^prec) for tau = sigma or rho."""
    tau = _rep_for(kind, tower)
    p = tower.p
    trace: list[tuple[str, str, int | float]] = []
    flags: list[str] = list(twist_data(E, tau).flags)
    if p >= 7:
        flags.append("unverified")
    Ls, sgn, L = l_star(E, tau, budget, target)
    if Ls == 0:
        flags.append("L-value vanishes")
        return CurlyLValue(kind, PadicNumber.from_rational(0, p, prec), Ls, trace, flags)
    _record(trace, "L*", Ls, p)
    eps = _eps(kind, tower)
    # (-2i)^{d-} times the root of unity of eps_p must be real
    inf = (CycloNumber.zeta(4, 3) * 2) ** tau.d_minus * eps.root
    inf_q = inf.rational_value()
    if inf_q is None:
        raise ArithmeticError("(-2i)^{d-} eps / |eps| is not rational")
    _record(trace, "(-2i)^{d-} eps/|eps|", inf_q, p)
    other = tau.conductor // p**tau.n_tau
    root_other = math.isqrt(other)
    if root_other**2 != other:
        raise ArithmeticError("prime-to-p conductor is not a square")
    _record(trace, "p^{n/2}/sqrt(N)", Fraction(1, root_other), p)
    euler = Fraction(1)
    for q in sorted(set(sympy.factorint(tower.m)) | {p}):
        Pq = twist_local_poly(E, tau, q)
        val = Fraction(poly_eval([Fraction(int(c)) for c in Pq], Fraction(1, q)))
        _record(trace, f"P_{q}(E,tau,1/{q})", val, p)
        euler *= val
    rational = sgn * Ls * inf_q * euler / root_other
    work = prec + 4 + abs(int(ord_p(rational, p))) if rational else prec + 4
    u, w = unit_root(E, p, work + 4)
    Pp = [Fraction(int(c)) for c in local_poly_rep(tau, p)]
    one = PadicNumber.from_rational(1, p, work + 4)
    num = one * 0
    den = one * 0
    for k, c in enumerate(Pp):
        num = num + (one / u) ** k * c
        den = den + (one / w) ** k * c
    ratio = num / den
    _record(trace, "P_p(tau,u^-1)/P_p(tau,w^-1)", ratio, p)
    upow = (one / u) ** tau.n_tau
    _record(trace, "u^-n(tau)", upow, p)
    value = (ratio * upow * rational).with_prec(prec)
    return CurlyLValue(kind, value, Ls, trace, flags)


# ---------------------------------------------------------------------------
# congruences
# ---------------------------------------------------------------------------


@dataclass
class CongruenceReport:
    sigma: CurlyLValue
    rho: CurlyLValue
    congruent: bool
    both_units: bool
    depth: int | float  # largest k with L(sigma) = L(rho) mod p^k (capped at precision)
    b: int  # ord_p(prod c_v over K * |E~(F_p)[p]|)
    flags: list[str] = field(default_factory=list)


def tamagawa_torsion_exponent(E: Curve, tower: Tower) -> int:
    """b = ord_p of prod_v c_v (over K) times |E~(F_p)[p]|."""
    p = tower.p
    c = tamagawa_product(E, "K", tower)
    npts = points_over(E, p, 1)
    return int(ord_p(c, p)) + min(1, int(ord_p(npts, p)))


def congruence_check(E: Curve, tower: Tower, prec: int = 4, budget: int | None = None,
                     target: float = DEFAULT_TARGET) -> CongruenceReport:
    ls = curly_l(E, "sigma", tower, prec, budget, target)
    lr = curly_l(E, "rho", tower, prec, budget, target)
    diff = ls.value - lr.value
    depth: int | float = diff.valuation() if not diff.is_zero() else prec
    flags: list[str] = []
    if ls.value.is_zero() and lr.value.is_zero():
        flags.append("0 = 0")
    congruent = depth >= 1
    both_units = ls.value.is_unit() and lr.value.is_unit()
    if not congruent:
        flags.append("counterexample to the congruence")
    return CongruenceReport(ls, lr, congruent, both_units, depth,
                            tamagawa_torsion_exponent(E, tower), flags)


def lemuzhas_check(E: Curve, delta: int, p: int, prec: int = 10) -> int:
    """ord_p |E~(F_p)|^{2 delta} minus ord_p of the unit-root Euler product.

    The right-hand side is (P_p(tau,u^-1)/P_p(tau,w^-1)) P_p(E,tau,1/p) for
    P_p(tau,T) = (1-T)^delta, where P_p(E,tau,T) = P_p(E,T)^delta.  The
    returned residual is 0 whenever the two sides have equal valuation.
    """
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    if delta == 0:
        return 0
    u, w = unit_root(E, p, prec)
    one = PadicNumber.from_rational(1, p, prec)
    a = ap(E, p)
    lhs = Fraction(1 + p - a) ** 2
    Pe = Fraction(1) - Fraction(a, p) + Fraction(p, p * p)
    rhs = (one - one / u) / (one - one / w) * Pe
    if rhs.is_zero():
        raise ArithmeticError("precision too low for the unit-root product")
    return int(ord_p(lhs, p)) - rhs.valuation()


__all__ = [
    "BsdReport",
    "CongruenceReport",
    "CurlyLValue",
    "TwistData",
    "bsd_quotient",
    "clear_caches",
    "congruence_check",
    "curly_l",
    "denominator_bound",
    "is_vanishing",
    "l_star",
    "lemuzhas_check",
    "tamagawa_torsion_exponent",
    "twist_data",
    "twisted_l_value",
    "unit_root",
]
