"""Iwasawa invariants and Euler characteristics in the false Tate tower.

All Euler characteristics are handled through their p-adic valuations.
Hypotheses that cannot be verified here (finiteness of Selmer groups,
vanishing of mu, values of Sha) enter as :class:`Provenanced` inputs
tagged ``descent-known``, ``BSD-analytic`` or ``assumed`` and are carried
into every report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .artin import InconsistencyError, sigma, sign
from .elliptic import ADDITIVE, GOOD, NONSPLIT, SPLIT, Curve, local_data_over, model_correction, points_over
from .fieldtower import Tower, UnsupportedError, legendre, multiplicative_order, prime_decomposition
from .numerics import PadicNumber, ord_p

PROVENANCES = ("descent-known", "BSD-analytic", "assumed", "derived")


@dataclass(frozen=True)
class Provenanced:
    """A value together with where it came from."""

    value: Any
    provenance: str

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


def _ord(x: Any, p: int) -> int:
    v = ord_p(Fraction(x), p)
    if v == math.inf:
        raise ValueError("valuation of zero")
    return int(v)


# ---------------------------------------------------------------------------
# power series and Weierstrass preparation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSeriesZp:
    """f = sum a_i T^i in Z_p[[T]], known modulo (p^prec, T^degree)."""

    p: int
    prec: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        mod = self.p**self.prec
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def padic_coefficients(self) -> list[PadicNumber]:
        return [PadicNumber.from_rational(c, self.p, self.prec) for c in self.coeffs]

    def __mul__(self, other: "PowerSeriesZp") -> "PowerSeriesZp":
        n = min(self.degree, other.degree)
        return PowerSeriesZp(self.p, min(self.prec, other.prec), _mul_trunc(self.coeffs, other.coeffs, n, self.modulus))

    def value_at_zero(self) -> int:
        return self.coeffs[0] if self.coeffs else 0


def _mul_trunc(a: Sequence[int], b: Sequence[int], n: int, mod: int) -> tuple[int, ...]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] = (out[i + j] + x * y) % mod
    return tuple(out)


def _inverse_series(a: Sequence[int], n: int, mod: int) -> tuple[int, ...]:
    inv0 = pow(a[0], -1, mod)
    out = [0] * n
    out[0] = inv0
    for k in range(1, n):
        s = sum(a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1))
        out[k] = (-s * inv0) % mod
    return tuple(out)


@dataclass(frozen=True)
class IwasawaInvariants:
    """f = p^mu * P(T) * U(T) with P distinguished of degree lambda and U a unit."""

    p: int
    lam: int
    mu: int
    distinguished: tuple[int, ...]  # monic, constant term first, modulo p^(prec - mu)
    unit: tuple[int, ...]
    prec: int  # p-adic precision of the factorization p^mu * P * U
    degree: int  # T-adic precision of the factorization
    poly_prec: int  # P is independent of the truncation of f modulo p^poly_prec


def weierstrass_prepare(f: PowerSeriesZp) -> IwasawaInvariants:
    """Weierstrass preparation by Weierstrass division of T^lambda by f / p^mu."""
    p, N = f.p, f.prec
    nonzero = [c for c in f.coeffs if c]
    if not nonzero:
        raise ArithmeticError(f"precision too low: f vanishes modulo p^{N}; raise the p-adic precision")
    mu = min(_ord(c, p) for c in nonzero)
    prec = N - mu
    mod = p**prec
    g = [(c // p**mu) % mod for c in f.coeffs]
    lam = next((i for i, c in enumerate(g) if c % p), None)
    if lam is None:
        raise ArithmeticError("precision too low: no unit coefficient within the truncation degree")
    D = len(g) - lam  # T-adic precision of the result
    if D < 1:
        raise ArithmeticError("truncation degree too small for preparation")
    low = g[:lam]
    H = g[lam:]
    Hinv = _inverse_series(H, D, mod)
    # q = H^-1 (1 - tau(q * low)), a contraction because low = 0 mod p
    q: tuple[int, ...] = Hinv
    for _ in range(prec + 1):
        ql = _mul_trunc(q, low, D + lam, mod) if low else (0,) * (D + lam)
        shifted = [(-x) % mod for x in ql[lam:lam + D]]
        shifted[0] = (shifted[0] + 1) % mod
        q = _mul_trunc(Hinv, shifted, D, mod)
    qg = _mul_trunc(q, g, lam + D, mod)
    P = tuple(qg[: lam + 1])
    if P[lam] != 1 % mod or any(x % mod for x in qg[lam + 1: lam + D]):
        raise InconsistencyError("Weierstrass division did not close")
    U = _inverse_series(q, D, mod)
    # Terms of f beyond T^D reach the coefficients of P only after repeated
    # division by T^lambda, gaining a factor p each time.
    poly_prec = prec if lam == 0 else min(prec, -(-(D - lam) // lam))
    if lam and any(c % p for c in P[:lam]):
        raise InconsistencyError("distinguished polynomial has a unit non-leading coefficient")
    return IwasawaInvariants(p, lam, mu, P, U, prec, D, poly_prec)


def reconstruct(inv: IwasawaInvariants) -> PowerSeriesZp:
    """p^mu * P * U truncated to the precision of the factorization."""
    n = inv.degree
    mod = inv.p**inv.prec
    prod = _mul_trunc(inv.distinguished, inv.unit, n, mod)
    scale = inv.p**inv.mu
    return PowerSeriesZp(inv.p, inv.prec + inv.mu, tuple(scale * c for c in prod))


# ---------------------------------------------------------------------------
# bad prime sets and Euler characteristics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BadPrime:
    """``count`` primes of a field above the rational prime q sharing the same data."""

    q: int
    f: int
    count: int
    kind: str
    contribution: int  # ord_p L_v(E/k, 1)^-1 for one prime


@dataclass
class BadPrimeSets:
    field: str
    P1: list[BadPrime] = field(default_factory=list)
    P2: list[BadPrime] = field(default_factory=list)

    def total(self) -> int:
        return sum(b.count * b.contribution for b in self.P1 + self.P2)

    @property
    def empty(self) -> bool:
        return not self.P1 and not self.P2


def bad_sets(E: Curve, fld: str, tower: Tower) -> BadPrimeSets:
    """P1 (split multiplicative) and P2 (good with p-torsion on the reduction) over k."""
    p = tower.p
    out = BadPrimeSets(fld)
    for q in tower.m_primes:
        if q == p:
            continue
        for ld in local_data_over(E, fld, q, tower):
            Nv = ld.norm
            if ld.kind == SPLIT:
                out.P1.append(BadPrime(q, ld.f, ld.count, ld.kind, _ord(Nv - 1, p)))
            elif ld.kind == GOOD:
                npts = ld.points()
                if npts % p == 0:
                    out.P2.append(BadPrime(q, ld.f, ld.count, ld.kind, _ord(npts, p)))
    return out


def _points_above_p_ord(E: Curve, fld: str, tower: Tower) -> int:
    """sum over v | p of ord_p |E~(F_v)|."""
    p = tower.p
    total = 0
    for e, f in prime_decomposition(p, fld, tower):
        total += _ord(points_over(E, p, f), p)
    return total


def chi_cyc_ord(E: Curve, fld: str, tower: Tower, sha_ord: Provenanced, torsion_ord: int,
                tamagawa: int) -> int:
    """ord_p of |Sha[p^oo]| prod_{v|p} |E~(F_v)|^2 prod c_v / |E(k)|^2."""
    if E.conductor % tower.p == 0:
        raise UnsupportedError("unsupported: E must have good reduction at p")
    return int(sha_ord.value) + 2 * _points_above_p_ord(E, fld, tower) + _ord(tamagawa, tower.p) - 2 * torsion_ord


def analytic_chi_cyc_ord(E: Curve, fld: str, tower: Tower, l_star_k: Fraction) -> int:
    """ord_p chi_cyc(E/k) with Sha replaced by its analytic order.

    Torsion and Tamagawa numbers cancel: ord_p chi_cyc = ord_p(L*(E/k) / Norm A) +
    2 sum_{v|p} ord_p |E~(F_v)|.
    """
    if l_star_k == 0:
        raise UnsupportedError("Selmer group infinite (L-value vanishes)")
    corr = model_correction(E, fld, tower).norm
    return _ord(l_star_k / corr, tower.p) + 2 * _points_above_p_ord(E, fld, tower)


def chi_na_ord(E: Curve, fld: str, tower: Tower, chi_cyc: int) -> tuple[int, list[str]]:
    """ord_p chi_cyc(E/k) + sum_{P1 u P2} ord_p L_v(E/k,1)^-1, with hypothesis flags."""
    flags: list[str] = []
    if tower.p < 5:
        flags.append("chi'_na surrogate (p = 3)")
    return chi_cyc + bad_sets(E, fld, tower).total(), flags


def chi_na_twists(chi_na_K: int, chi_na_F: int, p: int) -> tuple[int, int]:
    """(ord chi_na(E, sigma), ord chi_na(E, rho)) from the Artin formalism."""
    diff = chi_na_F - chi_na_K
    if diff % (p - 1):
        raise InconsistencyError(f"ord chi_na(E/F) - ord chi_na(E/K) = {diff} is not divisible by {p - 1}")
    if diff < 0:
        raise InconsistencyError("negative valuation for chi_na(E, rho)")
    return chi_na_K, diff // (p - 1)


# ---------------------------------------------------------------------------
# lambda invariants in F/K
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaReport:
    lam_K: Provenanced
    lam_F: int
    V1: int  # number of primes of F^cyc in V1 that ramify over K^cyc
    V2: int
    unchanged: bool
    degree: int


def primes_in_cyclotomic(Nv: int, p: int) -> int:
    """Number of primes of k^cyc above a prime v of k (v not above p), Nv = 1 mod p."""
    return p ** (_ord(Nv - 1, p) - 1)


def lambda_hm(E: Curve, tower: Tower, lam_K: Provenanced) -> LambdaReport:
    """lambda_{E/F} = p lambda_{E/K} + sum_{V1} (e-1) + 2 sum_{V2} (e-1), assuming mu_{E/K} = 0."""
    p = tower.p
    for q in tower.m_primes:
        if q != p and E.kind(q) == ADDITIVE:
            if p == 3:
                raise UnsupportedError("unsupported: additive reduction may become unstable for p = 3")
    V1 = V2 = 0
    for q in tower.m_primes:
        if q == p:
            continue
        for ld in local_data_over(E, "K", q, tower):
            n = ld.count * primes_in_cyclotomic(ld.norm, p)
            if ld.kind == SPLIT:
                V1 += n
            elif ld.kind == GOOD and ld.points() % p == 0:
                V2 += n
    lam_F = p * int(lam_K.value) + (p - 1) * V1 + 2 * (p - 1) * V2
    unchanged = lam_F == int(lam_K.value)
    return LambdaReport(lam_K, lam_F, V1, V2, unchanged, p)


# ---------------------------------------------------------------------------
# root numbers and ranks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootNumberReport:
    w_K: int
    S: tuple[int, ...]
    w_rho: int
    rank_bound: int | None  # lower bound for rank E(F) - rank E(K) when w_rho = -1


def root_number_rho_n(E: Curve, tower: Tower, w_E: int | None = None) -> RootNumberReport:
    """w(E, rho_n) = w(E/K) prod_{q in S} (q/p), the same for every layer n."""
    p = tower.p
    for q in tower.m_primes:
        if E.kind(q) == ADDITIVE:
            raise UnsupportedError(f"unsupported: m divisible by the additive prime {q}")
    w_K = sign(E, sigma(tower), w_E)
    S = tuple(q for q in tower.m_primes if E.kind(q) in (SPLIT, NONSPLIT))
    w = w_K
    for q in S:
        w *= legendre(q, p)
    return RootNumberReport(w_K, S, w, p - 1 if w == -1 else None)


@dataclass(frozen=True)
class ParityReport:
    h: int
    parity: int
    S1: tuple[int, ...]
    S2: tuple[int, ...]
    U: tuple[int, ...]
    lam: Provenanced


def _primes_of_K(q: int, p: int) -> int:
    return (p - 1) // multiplicative_order(q, p)


def hk_rank_parity(E: Curve, tower: Tower, lam: Provenanced) -> ParityReport:
    """h(E/F_oo) = lambda + sum_{S1} s_q + 2 sum_U s_q."""
    p = tower.p
    S1, S2, U = [], [], []
    for q in tower.m_primes:
        if q == p:
            continue
        kind = E.kind(q)
        if kind in (SPLIT, NONSPLIT):
            f = multiplicative_order(q, p)
            if kind == SPLIT or f % 2 == 0:
                S1.append(q)
            if legendre(q, p) == -1:
                S2.append(q)
        elif kind == GOOD:
            if all(ld.points() % p == 0 for ld in local_data_over(E, "K", q, tower)):
                U.append(q)
    h = int(lam.value) + sum(_primes_of_K(q, p) for q in S1) + 2 * sum(_primes_of_K(q, p) for q in U)
    return ParityReport(h, h % 2, tuple(S1), tuple(S2), tuple(U), lam)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class ChiReport:
    chi_cyc_K: int
    chi_cyc_F: int
    chi_na_K: int
    chi_na_F: int
    chi_na_sigma: int
    chi_na_rho: int
    sets_K: BadPrimeSets
    sets_F: BadPrimeSets
    provenance: dict[str, str] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)


def chi_report(E: Curve, tower: Tower, l_star_sigma: Fraction, l_star_rho: Fraction,
               provenance: str = "BSD-analytic") -> ChiReport:
    """Euler characteristics over K and F from the algebraic L-values."""
    p = tower.p
    l_star_F = l_star_sigma * l_star_rho ** (p - 1)
    cK = analytic_chi_cyc_ord(E, "K", tower, l_star_sigma)
    cF = analytic_chi_cyc_ord(E, "F", tower, l_star_F)
    naK, flags = chi_na_ord(E, "K", tower, cK)
    naF, _ = chi_na_ord(E, "F", tower, cF)
    s, r = chi_na_twists(naK, naF, p)
    prov = {"Sha(E/K)": provenance, "Sha(E/F)": provenance}
    return ChiReport(cK, cF, naK, naF, s, r, bad_sets(E, "K", tower), bad_sets(E, "F", tower), prov, flags)


@dataclass
class MainTheoremReport:
    chi: ChiReport
    sigma_side: bool  # ord chi_na(E, sigma) = 0
    rho_side: bool  # Sel(E/F) finite and ord chi_na(E, rho) = 0
    consistent: bool
    predicted: tuple[int, int]
    computed: tuple[int | float, int | float] | None
    matches: bool | None
    hypotheses: dict[str, str] = field(default_factory=dict)


def main_theorem_report(E: Curve, tower: Tower, l_star_sigma: Fraction, l_star_rho: Fraction,
                        mu_K_zero: Provenanced = Provenanced(True, "assumed"),
                        computed: tuple[int | float, int | float] | None = None) -> MainTheoremReport:
    """Both sides of: chi_na(E, sigma) trivial iff Sel(E/F) finite and chi_na(E, rho) trivial."""
    sel_F_finite = l_star_sigma != 0 and l_star_rho != 0
    if l_star_sigma == 0:
        raise UnsupportedError("Selmer group over K infinite (L(E, sigma, 1) = 0)")
    if sel_F_finite:
        chi = chi_report(E, tower, l_star_sigma, l_star_rho)
        rho_side = chi.chi_na_rho == 0
        predicted = (chi.chi_na_sigma, chi.chi_na_rho)
    else:
        cK = analytic_chi_cyc_ord(E, "K", tower, l_star_sigma)
        naK, flags = chi_na_ord(E, "K", tower, cK)
        chi = ChiReport(cK, -1, naK, -1, naK, -1, bad_sets(E, "K", tower), bad_sets(E, "F", tower),
                        {"Sha(E/K)": "BSD-analytic"}, flags + ["Sel(E/F) infinite"])
        rho_side = False
        predicted = (naK, -1)
    sigma_side = chi.chi_na_sigma == 0
    matches = None
    if computed is not None:
        want_rho = predicted[1] if sel_F_finite else math.inf
        matches = computed[0] == predicted[0] and computed[1] == want_rho
    hyp = {"mu(E/K) = 0": mu_K_zero.provenance, "Sel finiteness": "BSD-analytic"}
    return MainTheoremReport(chi, sigma_side, rho_side, sigma_side == rho_side, predicted, computed, matches, hyp)


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    A_m_ord: int
    note: str


def regularity_report(E: Curve, tower: Tower, curly_sigma: PadicNumber) -> RegularityReport:
    """A unit L_E(sigma) implies X(E/F_oo) = 0 (one-directional criterion)."""
    p = tower.p
    A = 0
    for q in tower.m_primes:
        if q == p:
            continue
        for ld in local_data_over(E, "K", q, tower):
            val = Fraction(sum(c * Fraction(1, ld.norm) ** i for i, c in enumerate(ld.poly)))
            A += ld.count * _ord(val, p)
    if curly_sigma.is_unit():
        note = "regular (conditional on the integrality of the Mazur-Swinnerton-Dyer p-adic L-function)"
        if A != 0:
            raise InconsistencyError("unit L_E(sigma) with non-unit A_m")
        return RegularityReport(True, A, note)
    return RegularityReport(False, A, "no conclusion: L_E(sigma) is not a unit")


__all__ = [
    "BadPrime",
    "BadPrimeSets",
    "ChiReport",
    "IwasawaInvariants",
    "LambdaReport",
    "MainTheoremReport",
    "ParityReport",
    "PowerSeriesZp",
    "Provenanced",
    "RegularityReport",
    "RootNumberReport",
    "analytic_chi_cyc_ord",
    "bad_sets",
    "chi_cyc_ord",
    "chi_na_ord",
    "chi_na_twists",
    "chi_report",
    "hk_rank_parity",
    "lambda_hm",
    "main_theorem_report",
    "primes_in_cyclotomic",
    "reconstruct",
    "regularity_report",
    "root_number_rho_n",
    "weierstrass_prepare",
]
