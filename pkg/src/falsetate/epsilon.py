"""Local epsilon factors at p of sigma and rho.

Normalization: Haar measure with mu(Z_p) = 1 and additive character
s(a p^-n) = exp(2 pi i a / p^n).  For a Dirichlet character chi mod p,

    eps_p(chi) = sum_{j=1}^{p-1} (chi o theta_p)(j/p) exp(2 pi i j / p),

and eps_p(sigma) is the product over all chi.  For rho = Ind psi,

    eps_p(rho) / eps_p(sigma) = sum_{x in T} (psi o theta_v)(x) exp(2 pi i Tr(x)),

where T runs over representatives of pi^(2-p-n) O^x modulo pi^(2-p) O in
K_v = Q_p(zeta_p), n = n_psi.  The local symbol psi o theta_v(x) is
computed globally: x is replaced by x' in K congruent to x multiplicatively
modulo v^n and to 1 modulo every prime above a divisor q != p of m, and
theta_v(x) = prod_{w != v} theta_w(x')^(-1) with theta_w(x') = Frob_w^(-ord_w(x'))
at the unramified primes w, read off from the Kummer symbols of m.

The local reciprocity map at p sends a unit u of Z_p to zeta -> zeta^(u^-1)
on Q(zeta_p) and p to the identity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import sympy

from .artin import ArtinRep, chi_value, decompose_sigma
from .fieldtower import Tower, cyclotomic_roots_mod, kummer_symbol, require_not_inert
from .numerics import CycloNumber, ord_p


@dataclass(frozen=True)
class EpsilonFactor:
    """value = root * p^(half_exponent / 2) with |root| = 1."""

    p: int
    root: CycloNumber
    half_exponent: int
    exact: CycloNumber

    @property
    def magnitude_squared(self) -> int:
        return self.p**self.half_exponent

    def root_as_sign(self) -> int | None:
        r = self.root.rational_value()
        return int(r) if r in (1, -1) else None

    def root_label(self) -> str:
        """'', '-', 'i*' or '-i*' when the root is a fourth root of unity."""
        for label, k in (("", 0), ("i*", 1), ("-", 2), ("-i*", 3)):
            if self.root == CycloNumber.zeta(4, k):
                return label
        return f"({self.root!r})*"

    def __str__(self) -> str:
        e = self.half_exponent
        power = f"{self.p}^{{{e}/2}}" if e % 2 else f"{self.p}^{e // 2}"
        return self.root_label() + power

    def __complex__(self) -> complex:
        return complex(self.exact)


def sqrt_p(p: int) -> CycloNumber:
    """The positive square root of p inside a cyclotomic field."""
    g = CycloNumber.rational(0, p)
    for a in range(1, p):
        leg = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
        g = g + CycloNumber.zeta(p, a) * leg
    # the quadratic Gauss sum is sqrt(p) for p = 1 mod 4 and i sqrt(p) otherwise
    if p % 4 == 1:
        return g
    return g * CycloNumber.zeta(4, 3)


def make_epsilon(p: int, value: CycloNumber, half_exponent: int) -> EpsilonFactor:
    """Split ``value`` as root * p^(half_exponent/2), checking |root| = 1."""
    if value * value.conjugate() != p**half_exponent:
        raise ArithmeticError(f"epsilon factor {value!r} has the wrong absolute value")
    denom: CycloNumber = CycloNumber.rational(p ** (half_exponent // 2))
    if half_exponent % 2:
        denom = denom * sqrt_p(p)
    return EpsilonFactor(p, value / denom, half_exponent, value)


# ---------------------------------------------------------------------------
# sigma
# ---------------------------------------------------------------------------


def gauss_eps_chi(chi: ArtinRep) -> EpsilonFactor:
    """eps_p(chi): 1 for the trivial character, a Gauss sum otherwise."""
    p = chi.p
    if chi.is_trivial_character:
        return make_epsilon(p, CycloNumber.rational(1), 0)
    total = CycloNumber.rational(0, p * (p - 1))
    for j in range(1, p):
        # chi(theta_p(j/p)) = chi(j)^(-1)
        total = total + chi_value(chi, j).conjugate() * CycloNumber.zeta(p, j)
    return make_epsilon(p, total, 1)


def eps_sigma(tower: Tower) -> EpsilonFactor:
    value = CycloNumber.rational(1)
    for chi in decompose_sigma(tower):
        value = value * gauss_eps_chi(chi).exact
    return make_epsilon(tower.p, value, tower.p - 2)


# ---------------------------------------------------------------------------
# rho
# ---------------------------------------------------------------------------


def trace_K(x: CycloNumber, p: int) -> Fraction:
    total = CycloNumber.rational(0, p)
    for a in range(1, p):
        total = total + x.galois(a)
    r = total.rational_value()
    assert r is not None
    return r


def additive_character(tr: Fraction) -> CycloNumber:
    """exp(2 pi i tr) for tr with p-power denominator."""
    b = tr.denominator
    return CycloNumber.zeta(b, tr.numerator % b) if b > 1 else CycloNumber.rational(1)


def _integral_parts(x: CycloNumber) -> tuple[list[int], int]:
    """x = X / D with integer coefficient vector X and D > 0."""
    D = 1
    for c in x.coeffs:
        D = math.lcm(D, c.denominator)
    return [int(c * D) for c in x.coeffs], D


def _mod_inverse_in_OK(x: CycloNumber, q: int, p: int) -> list[int]:
    """Coefficient vector (mod q) of x^-1 for x a unit at every prime above q."""
    inv = x.inverse()
    out = []
    for c in inv.coeffs:
        if c.denominator % q == 0:
            raise ArithmeticError("element is not a unit above q")
        out.append(c.numerator * pow(c.denominator, -1, q) % q)
    return out


@dataclass
class LocalSymbol:
    """psi o theta_v on K_v^x, computed by the global product formula."""

    tower: Tower
    pi: CycloNumber

    def __post_init__(self) -> None:
        self.p = self.tower.p
        self.n_psi = self.tower.n_psi
        self.m_primes = [q for q in self.tower.m_primes if q != self.p]

    # -- helpers ---------------------------------------------------------------
    def v_ord(self, x: CycloNumber) -> int:
        """Valuation at the prime above p (normalized by ord(pi) = 1)."""
        nrm = x.norm()
        v = ord_p(nrm, self.p)
        if v == math.inf:
            raise ValueError("valuation of zero")
        return int(v)

    def approximate(self, x: CycloNumber) -> CycloNumber:
        """x' = x (1 + pi^n t) with x' = 1 modulo every prime above q | m, q != p."""
        p, n = self.p, self.n_psi
        xp = self._make_unit_above(x)
        modulus = 1
        for q in self.m_primes:
            modulus *= q
        if modulus == 1:
            return xp
        pin = self.pi ** n
        # solve t = (x^-1 - 1) pi^-n modulo each q, combine by CRT on coefficients
        target = xp.inverse() - 1
        t_exact = target / pin
        coeffs = []
        for c in t_exact.coeffs:
            residues, moduli = [], []
            for q in self.m_primes:
                if c.denominator % q == 0:
                    raise ArithmeticError("approximation failed at a prime dividing m")
                residues.append(c.numerator * pow(c.denominator, -1, q) % q)
                moduli.append(q)
            r = int(sympy.ntheory.modular.crt(moduli, residues)[0])
            coeffs.append(r)
        t = CycloNumber(p, coeffs)
        return xp * (1 + pin * t)

    def _make_unit_above(self, x: CycloNumber) -> CycloNumber:
        """Replace x by x + pi^(v(x)+n) r (same class modulo 1 + pi^n O_v), a unit above m.

        The search runs over r with coefficients in a box that doubles until
        the norm of the candidate is prime to every q | m, q != p.
        """
        p = self.p

        def ok(y: CycloNumber) -> bool:
            nrm = y.norm()
            return all(nrm.numerator % q and nrm.denominator % q for q in self.m_primes)

        if ok(x):
            return x
        shift = self.pi ** (self.v_ord(x) + self.n_psi)
        box = 2
        while box <= 64:
            for r in itertools.product(range(box), repeat=p - 1):
                if any(c >= box // 2 for c in r) or box == 2:
                    cand = x + shift * CycloNumber(p, r)
                    if ok(cand):
                        return cand
            box *= 2
        raise ArithmeticError("could not make the element a unit above m")  # pragma: no cover

    def _ord_at_primes(self, x: CycloNumber, ell: int) -> dict[int, int]:
        """ord_w(x) for the primes w above ell = 1 mod p, keyed by the residue r of zeta."""
        p = self.p
        X, D = _integral_parts(x)
        nrm = CycloNumber(p, X).norm()
        k = int(ord_p(nrm, ell)) + 2
        mod = ell**k
        out = {}
        dval = int(ord_p(D, ell))
        poly = sympy.Poly(sympy.cyclotomic_poly(p, sympy.Symbol("z")), sympy.Symbol("z"))
        for r in cyclotomic_roots_mod(p, ell):
            rr = _hensel_root(poly, r, ell, k)
            val = sum(c * pow(rr, i, mod) for i, c in enumerate(X)) % mod
            ov = ord_p(val, ell) if val else k
            out[r] = int(min(ov, k)) - dval
        return out

    def __call__(self, x: CycloNumber) -> int:
        """Exponent e with psi(theta_v(x)) = zeta_p^e."""
        p = self.p
        xp = self.approximate(x)
        nrm = xp.norm()
        total = 0
        primes = set(sympy.factorint(abs(nrm.numerator))) | set(sympy.factorint(nrm.denominator))
        for ell in sorted(primes):
            if ell == p or ell in self.m_primes:
                continue
            if (ell - 1) % p:
                continue  # Frobenius acts trivially on m^(1/p)
            for r, o in self._ord_at_primes(xp, ell).items():
                if o:
                    total += kummer_symbol(ell, r, self.tower) * o
        return total % p


def _hensel_root(poly: sympy.Poly, r: int, ell: int, k: int) -> int:
    f = [int(c) for c in poly.all_coeffs()]
    df = [int(c) for c in poly.diff().all_coeffs()]

    def ev(cs: list[int], x: int, mod: int) -> int:
        acc = 0
        for c in cs:
            acc = (acc * x + c) % mod
        return acc

    x = r
    mod = ell
    while mod < ell**k:
        mod = min(mod * mod, ell**k)
        x = (x - ev(f, x, mod) * pow(ev(df, x, mod), -1, mod)) % mod
    return x


def default_uniformizer(p: int) -> CycloNumber:
    return 1 - CycloNumber.zeta(p, 1)


def representatives(p: int, n_psi: int, pi: CycloNumber) -> Iterable[CycloNumber]:
    """T = { sum_{i=2-p-n}^{1-p} a_i pi^i : 0 <= a_i < p, a_(2-p-n) != 0 }."""
    lo, hi = 2 - p - n_psi, 1 - p
    pinv = pi.inverse()
    powers = {i: pinv ** (-i) for i in range(lo, hi + 1)}
    for digits in itertools.product(range(p), repeat=hi - lo + 1):
        if digits[0] == 0:
            continue
        x = CycloNumber.rational(0, p)
        for i, a in zip(range(lo, hi + 1), digits):
            if a:
                x = x + powers[i] * a
        yield x


def eps_ratio(tower: Tower, pi: CycloNumber | None = None) -> CycloNumber:
    """eps_v(psi) / eps_v(1) as an exact cyclotomic number."""
    require_not_inert(tower)
    p = tower.p
    if tower.local.behavior == "split":
        return CycloNumber.rational(1)
    pi = pi if pi is not None else default_uniformizer(p)
    symbol = LocalSymbol(tower, pi)
    total = CycloNumber.rational(0, p * p)
    for x in representatives(p, tower.n_psi, pi):
        e = symbol(x)
        total = total + CycloNumber.zeta(p, e) * additive_character(trace_K(x, p))
    return total


def eps_rho(tower: Tower, pi: CycloNumber | None = None) -> EpsilonFactor:
    ratio = eps_ratio(tower, pi)
    value = eps_sigma(tower).exact * ratio
    n_rho = tower.p - 2 + tower.n_psi
    return make_epsilon(tower.p, value, n_rho)


__all__ = [
    "EpsilonFactor",
    "LocalSymbol",
    "additive_character",
    "default_uniformizer",
    "eps_ratio",
    "eps_rho",
    "eps_sigma",
    "gauss_eps_chi",
    "representatives",
    "sqrt_p",
    "trace_K",
]
