"""The fields Q, K = Q(mu_p), L = Q(m^(1/p)) and F = K L.

Everything here is a pure function of ``(p, m)`` and a rational prime q:
splitting of q, Frobenius classes, the Kummer symbol of m at primes of K,
the conductor of the (p-1)-dimensional representation rho, and the local
behaviour of the prime above p in F/K.

Labeling convention: zeta = exp(2 pi i / p) and m^(1/p) is the positive
real root.  A prime w of K above q = 1 mod p is named by the residue
``r`` of zeta modulo w, i.e. by a root of the p-th cyclotomic polynomial
modulo q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import sympy

from .numerics import ord_p


class UnsupportedError(ValueError):
    """Raised for inputs outside the supported range (CLI exit code 2)."""


FIELDS = ("Q", "K", "L", "F")


def legendre(q: int, p: int) -> int:
    """Quadratic residue symbol (q/p) for an odd prime p not dividing q."""
    if q % p == 0:
        raise ValueError("legendre symbol needs q coprime to p")
    return 1 if pow(q, (p - 1) // 2, p) == 1 else -1


def multiplicative_order(q: int, p: int) -> int:
    """Order of q in (Z/p)^x."""
    if q % p == 0:
        raise ValueError("q must be coprime to p")
    k, x = 1, q % p
    while x != 1:
        x = x * q % p
        k += 1
    return k


def p_power_free(m: int, p: int) -> bool:
    """True when no n > 1 has n^p dividing m."""
    return all(e < p for e in sympy.factorint(m).values())


def _teichmuller(a: int, p: int, prec: int) -> int:
    """Teichmuller representative of a modulo p^prec."""
    mod = p**prec
    w = a % mod
    for _ in range(prec + 1):
        w = pow(w, p, mod)
    return w


@dataclass(frozen=True)
class KummerLocal:
    """Local analysis of K_v(m^(1/p)) / K_v at the prime v above p.

    ``level`` is the pi-adic valuation of m/omega(m) - 1 (pi = 1 - zeta, so
    v_pi(p) = p - 1), or ``None`` when p divides m.  ``behavior`` is one of
    ``ramified``, ``split`` or ``inert`` and ``n_psi`` is the conductor
    exponent of the Kummer character.
    """

    level: int | None
    behavior: str
    n_psi: int


@dataclass(frozen=True)
class Tower:
    """The tower Q < K = Q(mu_p) < F = Q(mu_p, m^(1/p)) together with L."""

    p: int
    m: int
    local: KummerLocal = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p, m = self.p, self.m
        if p < 3 or not sympy.isprime(p):
            raise UnsupportedError(f"p must be an odd prime, got {p}")
        if m < 2:
            raise UnsupportedError(f"m must be at least 2, got {m}")
        if not p_power_free(m, p):
            raise UnsupportedError(f"m={m} is divisible by a {p}-th power")
        object.__setattr__(self, "local", kummer_local(p, m))

    # derived data -----------------------------------------------------------
    @property
    def degree(self) -> dict[str, int]:
        p = self.p
        return {"Q": 1, "K": p - 1, "L": p, "F": p * (p - 1)}

    @property
    def m_primes(self) -> list[int]:
        return sorted(sympy.factorint(self.m))

    @property
    def n_psi(self) -> int:
        return self.local.n_psi

    @property
    def delta(self) -> int:
        """Dimension of the inertia invariants of rho at p (0 or 1)."""
        return 1 if self.local.behavior == "split" else 0

    @property
    def N_sigma(self) -> int:
        return self.p ** (self.p - 2)

    @property
    def N_rho(self) -> int:
        return rho_conductor(self)

    def same_field(self, other: "Tower") -> bool:
        """Whether Q(m^(1/p)) and Q(m'^(1/p)) coincide (m' = m^k times a p-th power)."""
        if self.p != other.p:
            return False
        p = self.p
        for k in range(1, p):
            x = self.m**k
            fac = sympy.factorint(x)
            reduced = 1
            for q, e in fac.items():
                reduced *= q ** (e % p)
            if reduced == other.m:
                return True
        return False


@lru_cache(maxsize=None)
def kummer_local(p: int, m: int) -> KummerLocal:
    """Classify K_v(m^(1/p))/K_v by the level of m relative to the unit filtration."""
    if m % p == 0:
        # v_pi(m) = (p-1) v_p(m) is prime to p: totally ramified, wild conductor p + 1
        return KummerLocal(None, "ramified", p + 1)
    prec = 4
    mod = p**prec
    u = m * pow(_teichmuller(m, p, prec), -1, mod) % mod  # principal unit, u = 1 mod p
    v = ord_p(u - 1, p) if u != 1 else prec
    assert isinstance(v, int)
    level = (p - 1) * v  # pi-adic level of u - 1
    if level > p:
        # 1 + pi^(p+1) O lies in the p-th powers
        return KummerLocal(level, "split", 0)
    if level == p:  # pragma: no cover - impossible for rational m, kept for completeness
        return KummerLocal(level, "inert", 0)
    return KummerLocal(level, "ramified", p + 1 - level)


def p_behavior_in_F_over_K(tower: Tower) -> str:
    """``ramified``, ``split`` or ``inert`` for the prime above p in F/K."""
    return tower.local.behavior


def require_not_inert(tower: Tower) -> None:
    if tower.local.behavior == "inert":
        raise UnsupportedError("unsupported: p inert in F/K")


def rho_conductor(tower: Tower) -> int:
    """Conductor of rho, equal to |disc Q(m^(1/p))|."""
    p = tower.p
    N = p ** (p - 2 + tower.n_psi)
    for q in tower.m_primes:
        if q != p:
            N *= q ** (p - 1)
    return N


@dataclass(frozen=True)
class FrobClass:
    """Conjugacy data of Frobenius at q (q prime to mp) in Gal(F/Q)."""

    q: int
    order: int  # order of q modulo p
    split_in_L: bool | None  # only for q = 1 mod p

    @property
    def totally_split(self) -> bool:
        return self.order == 1 and bool(self.split_in_L)


def frobenius_class(q: int, tower: Tower) -> FrobClass:
    p, m = tower.p, tower.m
    if (m * p) % q == 0:
        raise ValueError(f"prime {q} ramifies in F")
    d = multiplicative_order(q, p)
    split = None
    if d == 1:
        split = pow(m % q, (q - 1) // p, q) == 1
    return FrobClass(q, d, split)


@lru_cache(maxsize=4096)
def cyclotomic_roots_mod(p: int, q: int) -> tuple[int, ...]:
    """Sorted roots of the p-th cyclotomic polynomial modulo q (q = 1 mod p)."""
    if (q - 1) % p:
        return ()
    g = sympy.primitive_root(q)
    z = pow(g, (q - 1) // p, q)
    return tuple(sorted(pow(z, k, q) for k in range(1, p)))


def kummer_symbol(q: int, r: int | None, tower: Tower) -> int:
    """Exponent c with Frob_w(m^(1/p)) = zeta^c m^(1/p).

    ``w`` is the prime of K above q on which zeta reduces to ``r`` (needed
    when q = 1 mod p).  For other q the symbol is 0: the residue field of
    K_w has no non-trivial p-th roots of unity coming from F_q^x.
    """
    p, m = tower.p, tower.m
    if (m * p) % q == 0:
        raise ValueError("kummer symbol needs q prime to mp")
    if (q - 1) % p:
        return 0
    if r is None or pow(r, p, q) != 1 or r % q == 1:
        raise ValueError("r must be a primitive p-th root of unity modulo q")
    target = pow(m % q, (q - 1) // p, q)
    x = 1
    for c in range(p):
        if x == target:
            return c
        x = x * r % q
    raise ArithmeticError("m^((q-1)/p) is not a power of r")  # pragma: no cover


def prime_decomposition(q: int, fld: str, tower: Tower) -> list[tuple[int, int]]:
    """List of (e, f) for the primes above q in the field ``fld``."""
    p, m = tower.p, tower.m
    if fld == "Q":
        return [(1, 1)]
    if q == p:
        if fld == "K":
            return [(p - 1, 1)]
        ram = tower.local.behavior == "ramified"
        if fld == "L":
            return [(p, 1)] if ram else [(p - 1, 1), (1, 1)]
        return [(p * (p - 1), 1)] if ram else [(p - 1, 1)] * p
    d = multiplicative_order(q, p)
    if fld == "K":
        return [(1, d)] * ((p - 1) // d)
    if m % q == 0:
        if fld == "L":
            return [(p, 1)]
        return [(p, d)] * ((p - 1) // d)
    cls = frobenius_class(q, tower)
    if fld == "L":
        if d == 1:
            return [(1, 1)] * p if cls.split_in_L else [(1, p)]
        return [(1, 1)] + [(1, d)] * ((p - 1) // d)
    # F
    if d == 1 and not cls.split_in_L:
        return [(1, p)] * (p - 1)
    return [(1, d)] * (p * (p - 1) // d)


def disc_pure_field(p: int, m: int) -> int:
    """|disc Q(m^(1/p))| computed from the ring of integers by sympy (small inputs)."""
    from sympy.polys.numberfields.basis import round_two
    from sympy import Poly, symbols

    x = symbols("x")
    _, disc = round_two(Poly(x**p - m, x, domain="ZZ"))
    return abs(int(disc))
