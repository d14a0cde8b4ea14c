"""The Artin representations sigma and rho of Gal(F/Q) and their twists by E.

``sigma`` is the sum of all Dirichlet characters modulo p, that is, the
induction of the trivial character of Gal(F/K).  ``rho`` is the induction
of a non-trivial character of Gal(F/K), the unique irreducible
representation of dimension p-1.  Both are rational and self-dual.

Local polynomials are tuples of coefficients, constant term first, in the
variable T = q^(-s).  Rational polynomials have ``int`` coefficients;
polynomials of a single Dirichlet character have :class:`CycloNumber`
coefficients in Q(zeta_(p-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

import sympy

from .elliptic import ADDITIVE, GOOD, SPLIT, Curve, local_poly_Q
from .fieldtower import (
    Tower,
    UnsupportedError,
    frobenius_class,
    legendre,
    multiplicative_order,
    require_not_inert,
)
from .numerics import CycloNumber

KINDS = ("sigma", "rho", "dirichlet", "trivial")


class InconsistencyError(ArithmeticError):
    """An internal identity failed (CLI exit code 1)."""


@dataclass(frozen=True)
class ArtinRep:
    """Descriptor of sigma, rho, a Dirichlet character mod p, or the trivial rep."""

    kind: str
    tower: Tower
    index: int = 0  # exponent k of a Dirichlet character chi_k(g) = zeta_(p-1)^k

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown representation kind {self.kind!r}")
        if self.kind == "dirichlet":
            object.__setattr__(self, "index", self.index % (self.tower.p - 1))

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def dimension(self) -> int:
        return self.p - 1 if self.kind in ("sigma", "rho") else 1

    @property
    def d_minus(self) -> int:
        if self.kind in ("sigma", "rho"):
            return (self.p - 1) // 2
        if self.kind == "dirichlet":
            return 0 if self.is_even else 1
        return 0

    @property
    def d_plus(self) -> int:
        return self.dimension - self.d_minus

    @property
    def is_even(self) -> bool:
        """chi(-1) = 1 (only meaningful for characters)."""
        # chi_k(-1) = zeta^(k (p-1)/2) = (-1)^k
        return self.kind != "dirichlet" or self.index % 2 == 0

    @property
    def order(self) -> int:
        if self.kind != "dirichlet":
            return 1
        return (self.p - 1) // math.gcd(self.index, self.p - 1)

    @property
    def is_trivial_character(self) -> bool:
        return self.kind == "trivial" or (self.kind == "dirichlet" and self.index == 0)

    @property
    def self_dual(self) -> bool:
        return self.kind != "dirichlet" or self.order <= 2

    @property
    def dual(self) -> "ArtinRep":
        if self.kind == "dirichlet":
            return ArtinRep("dirichlet", self.tower, -self.index)
        return self

    @property
    def conductor(self) -> int:
        if self.kind == "sigma":
            return self.tower.N_sigma
        if self.kind == "rho":
            return self.tower.N_rho
        return 1 if self.is_trivial_character else self.p

    @property
    def n_tau(self) -> int:
        """Exponent of p in the conductor."""
        c = self.conductor
        k = 0
        while c % self.p == 0:
            c //= self.p
            k += 1
        return k

    def ramified_at(self, q: int) -> bool:
        return self.conductor % q == 0

    def label(self) -> str:
        if self.kind == "dirichlet":
            return f"chi{self.index}"
        return self.kind

    def __repr__(self) -> str:
        return f"ArtinRep({self.label()}, p={self.p}, m={self.tower.m})"


def sigma(tower: Tower) -> ArtinRep:
    return ArtinRep("sigma", tower)


def rho(tower: Tower) -> ArtinRep:
    return ArtinRep("rho", tower)


# ---------------------------------------------------------------------------
# Dirichlet characters modulo p
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    return int(sympy.primitive_root(p))


@lru_cache(maxsize=None)
def discrete_logs(p: int) -> dict[int, int]:
    g = primitive_root(p)
    out, x = {}, 1
    for k in range(p - 1):
        out[x] = k
        x = x * g % p
    return out


def chi_value(chi: ArtinRep, a: int) -> CycloNumber:
    """chi_k(a) as an element of Q(zeta_(p-1)); 0 when p | a."""
    p = chi.p
    n = p - 1
    if chi.kind == "trivial":
        return CycloNumber.rational(1, n)
    if a % p == 0:
        # the trivial character has conductor 1 and takes the value 1 at p
        return CycloNumber.rational(1 if chi.index == 0 else 0, n)
    return CycloNumber.zeta(n, chi.index * discrete_logs(p)[a % p])


def decompose_sigma(tower: Tower) -> list[ArtinRep]:
    """The p-1 characters chi_0 (trivial), chi_1, ..., chi_(p-2) modulo p."""
    return [ArtinRep("dirichlet", tower, k) for k in range(tower.p - 1)]


# ---------------------------------------------------------------------------
# polynomial helpers
# ---------------------------------------------------------------------------


def poly_mul(a: Sequence[Any], b: Sequence[Any]) -> list[Any]:
    out: list[Any] = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _divide(x: Any, k: int) -> Any:
    if isinstance(x, CycloNumber):
        return x * Fraction(1, k)
    return Fraction(x) / k


def power_sums(P: Sequence[Any], count: int) -> list[Any]:
    """s_1..s_count of the inverse roots of P(T) = prod (1 - r_i T)."""
    n = len(P) - 1
    e = [(-1) ** k * P[k] for k in range(n + 1)]  # elementary symmetric
    s: list[Any] = []
    for k in range(1, count + 1):
        val: Any = (-1) ** (k - 1) * k * e[k] if k <= n else 0
        for i in range(1, min(k, n + 1)):
            val = val + (-1) ** (i - 1) * e[i] * s[k - i - 1]
        s.append(val)
    return s


def from_power_sums(s: Sequence[Any], degree: int) -> list[Any]:
    """Polynomial prod (1 - r_i T) with the given power sums of the r_i."""
    e: list[Any] = [1]
    for k in range(1, degree + 1):
        val: Any = 0
        for i in range(1, k + 1):
            val = val + (-1) ** (i - 1) * e[k - i] * s[i - 1]
        e.append(_divide(val, k))
    return [(-1) ** k * e[k] for k in range(degree + 1)]


def _normalize_coeffs(P: Sequence[Any]) -> tuple[Any, ...]:
    """Rational coefficients become ints (they must be integral); trailing zeros dropped."""
    out = []
    for c in P:
        if isinstance(c, CycloNumber):
            r = c.rational_value()
            c = c if r is None else r
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise InconsistencyError(f"non-integral local coefficient {c}")
            c = int(c)
        out.append(c)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def tensor_poly(P: Sequence[Any], Q: Sequence[Any]) -> tuple[Any, ...]:
    """Polynomial whose inverse roots are all products of inverse roots of P and Q."""
    degree = (len(P) - 1) * (len(Q) - 1)
    if degree == 0:
        return (1,)
    sp = power_sums(P, degree)
    sq = power_sums(Q, degree)
    return _normalize_coeffs(from_power_sums([a * b for a, b in zip(sp, sq)], degree))


def poly_eval(P: Sequence[Any], x: Any) -> Any:
    acc: Any = 0
    for c in reversed(P):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# local polynomials
# ---------------------------------------------------------------------------


def _cyclic_block(order: int, dim: int) -> tuple[int, ...]:
    """(1 - T^order)^(dim/order)."""
    out: list[Any] = [1]
    block = [1] + [0] * (order - 1) + [-1]
    for _ in range(dim // order):
        out = poly_mul(out, block)
    return tuple(out)


def local_poly_rep(tau: ArtinRep, q: int) -> tuple[Any, ...]:
    """det(1 - Frob_q^(-1) T | tau^(I_q))."""
    p, m = tau.p, tau.tower.m
    dim = tau.dimension
    if tau.kind == "trivial":
        return (1, -1)
    if tau.kind == "dirichlet":
        if q == p:
            return (1, -1) if tau.index == 0 else (1,)
        return _normalize_coeffs([CycloNumber.rational(1, p - 1), -chi_value(tau, q)])
    if q == p:
        if tau.kind == "sigma":
            return (1, -1)
        require_not_inert(tau.tower)
        return (1, -1) if tau.tower.delta else (1,)
    if tau.kind == "rho" and m % q == 0:
        return (1,)
    d = multiplicative_order(q, p)
    if tau.kind == "sigma" or d > 1:
        return _cyclic_block(d, dim)
    cls = frobenius_class(q, tau.tower)
    if cls.split_in_L:
        return _cyclic_block(1, dim)
    return tuple([1] * p)


def det_frob_inverse(P: Sequence[Any]) -> Any:
    """det(Frob^-1) on the space whose local polynomial is P."""
    n = len(P) - 1
    return (-1) ** n * P[-1] if n else 1


def twist_local_poly(E: Curve, tau: ArtinRep, q: int) -> tuple[Any, ...]:
    """det(1 - Frob_q^(-1) T | (M(E) tensor tau)^(I_q))."""
    if tau.kind == "trivial":
        return local_poly_Q(E, q)
    if E.kind(q) == ADDITIVE and tau.ramified_at(q):
        raise UnsupportedError(f"unsupported: additive ramified prime {q}")
    return tensor_poly(local_poly_Q(E, q), local_poly_rep(tau, q))


def _swan_rep(tau: ArtinRep, q: int) -> int:
    """Swan conductor exponent of tau at q (non-zero only at p for rho)."""
    if q != tau.p or tau.kind in ("trivial", "dirichlet"):
        return 0
    inv = len(local_poly_rep(tau, q)) - 1
    return tau.n_tau - (tau.dimension - inv)


def _ord(n: int, q: int) -> int:
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k


def twist_conductor_exponent(E: Curve, tau: ArtinRep, q: int) -> int:
    fE = _ord(E.conductor, q)
    ftau = _ord(tau.conductor, q)
    if fE == 0:
        return 2 * ftau
    if ftau == 0:
        return tau.dimension * fE
    if E.kind(q) == ADDITIVE:
        raise UnsupportedError(f"unsupported: additive ramified prime {q}")
    tame = 2 * tau.dimension - (len(twist_local_poly(E, tau, q)) - 1)
    return tame + 2 * _swan_rep(tau, q)


def twist_conductor(E: Curve, tau: ArtinRep) -> int:
    """Conductor N(E, tau)."""
    if tau.kind == "trivial":
        return E.conductor
    N = 1
    primes = set(sympy.factorint(E.conductor)) | set(sympy.factorint(tau.conductor))
    for q in sorted(primes):
        N *= q ** twist_conductor_exponent(E, tau, q)
    return N


def twist_conductor_factored(E: Curve, tau: ArtinRep) -> dict[int, int]:
    primes = set(sympy.factorint(E.conductor)) | set(sympy.factorint(tau.conductor))
    return {q: twist_conductor_exponent(E, tau, q) for q in sorted(primes)}


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------


def root_number_semistable(E: Curve) -> int:
    """w_E = - prod_q w_q for semistable E (w_q = -1 split, +1 nonsplit)."""
    if not E.is_semistable():
        raise UnsupportedError("use numeric sign")
    w = -1
    for q in E.bad_primes:
        if E.kind(q) == SPLIT:
            w = -w
    return w


def sign(E: Curve, tau: ArtinRep, w_E: int | None = None) -> int:
    """Sign in the functional equation of L(E, tau, s) for self-dual tau.

    ``w_E`` (the root number of E/Q) must be supplied when E has additive
    reduction somewhere; for semistable curves it is computed here.
    """
    if not tau.self_dual:
        raise ValueError("sign formula needs a self-dual representation")
    if w_E is None:
        w_E = root_number_semistable(E)
    result = w_E ** tau.dimension * (-1) ** tau.d_minus
    for q in E.bad_primes:
        kind = E.kind(q)
        if kind == ADDITIVE:
            if tau.ramified_at(q):
                raise UnsupportedError("use numeric sign")
            det = det_frob_inverse(local_poly_rep(tau, q))
            result *= _as_sign(det) ** _ord(E.conductor, q)
            continue
        P = local_poly_rep(tau, q)
        inv_dim = len(P) - 1
        s_q = -1 if kind == SPLIT else 1
        result *= s_q ** (tau.dimension - inv_dim) * _as_sign(det_frob_inverse(P))
    return result


def _as_sign(x: Any) -> int:
    if isinstance(x, CycloNumber):
        r = x.rational_value()
        if r is None:
            raise InconsistencyError("determinant is not rational for a self-dual representation")
        x = r
    if x not in (1, -1):
        raise InconsistencyError(f"determinant {x} is not a sign")
    return int(x)


def frobenius_charpoly(tau: ArtinRep, q: int) -> tuple[int, ...]:
    """Characteristic polynomial of Frob_q on the full representation (q prime to mp)."""
    if (tau.tower.m * tau.p) % q == 0:
        raise ValueError("Frobenius is defined only for unramified q")
    return local_poly_rep(tau, q)


__all__ = [
    "ArtinRep",
    "GOOD",
    "InconsistencyError",
    "chi_value",
    "decompose_sigma",
    "det_frob_inverse",
    "frobenius_charpoly",
    "legendre",
    "local_poly_rep",
    "poly_eval",
    "poly_mul",
    "rho",
    "root_number_semistable",
    "sigma",
    "sign",
    "tensor_poly",
    "twist_conductor",
    "twist_local_poly",
]
