"""Property checks shared by the module tests and the acceptance run.

Each function returns (number of cases checked, list of failures).
"""

from __future__ import annotations

import random

import sympy

from falsetate.artin import decompose_sigma, frobenius_charpoly, poly_mul, rho, sigma, twist_local_poly
from falsetate.elliptic import ap, local_data_over, local_poly_Q, parse_curve
from falsetate.epsilon import gauss_eps_chi
from falsetate.fieldtower import Tower, frobenius_class
from falsetate.iwasawa import PowerSeriesZp, _mul_trunc, reconstruct, weierstrass_prepare
from falsetate.numerics import primes_upto
from falsetate.padicl import lemuzhas_check

ARTIN_CASES = [("11A1", 3, 2), ("21A4", 5, 2), ("14A1", 5, 3), ("37A1", 3, 5), ("19A1", 5, 7)]
ORDINARY_LABELS = ["11A1", "14A1", "15A1", "17A1", "19A1", "20A1", "21A1", "21A4", "26A1", "26B1", "30A1",
                   "37A1", "79A1"]


def _ints(P) -> list[int]:
    out = [int(c) for c in P]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _spread(P, f: int) -> list[int]:
    """P(T^f)."""
    out = [0] * ((len(P) - 1) * f + 1)
    for i, c in enumerate(P):
        out[i * f] = int(c)
    return out


def _power(P, k: int) -> list[int]:
    out = [1]
    for _ in range(k):
        out = poly_mul(out, P)
    return _ints(out)


def _field_product(E, fld: str, q: int, T: Tower) -> list[int]:
    out = [1]
    for ld in local_data_over(E, fld, q, T):
        out = poly_mul(out, _power(_spread(ld.poly, ld.f), ld.count))
    return _ints(out)


def artin_local_identities(bound: int = 1000):
    """Over K, L, F the Euler factor at q factors as predicted by sigma and rho."""
    checked, failures = 0, []
    for label, p, m in ARTIN_CASES:
        E, T = parse_curve(label), Tower(p, m)
        s, r = sigma(T), rho(T)
        for q in primes_upto(bound).tolist():
            if (m * p) % q == 0:
                continue
            Ps = _ints(twist_local_poly(E, s, q))
            Pr = _ints(twist_local_poly(E, r, q))
            PE = _ints(local_poly_Q(E, q))
            ok = (_field_product(E, "K", q, T) == Ps
                  and _field_product(E, "L", q, T) == _ints(poly_mul(PE, Pr))
                  and _field_product(E, "F", q, T) == _ints(poly_mul(Ps, _power(Pr, p - 1))))
            checked += 1
            if not ok:
                failures.append((label, p, m, q))
    return checked, failures


def gauss_sum_magnitudes(primes=(3, 5, 7)):
    checked, failures = 0, []
    for p in primes:
        for chi in decompose_sigma(Tower(p, 2))[1:]:
            checked += 1
            if gauss_eps_chi(chi).magnitude_squared != p:
                failures.append((p, chi.index))
    return checked, failures


def ordinary_pairs(count: int, seed: int = 5):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        E = parse_curve(rng.choice(ORDINARY_LABELS))
        p = rng.choice([3, 5, 7, 11, 13])
        if E.conductor % p == 0 or ap(E, p) % p == 0:
            continue
        out.append((E, p, rng.choice([0, 1])))
    return out


def lemuzhas_residuals(count: int = 100):
    checked, failures = 0, []
    for E, p, delta in ordinary_pairs(count):
        checked += 1
        if lemuzhas_check(E, delta, p) != 0:
            failures.append((E.label, p, delta))
    return checked, failures


def weierstrass_round_trips(count: int = 500, seed: int = 1):
    rng = random.Random(seed)
    checked, failures = 0, []
    for _ in range(count):
        p = rng.choice([3, 5, 7])
        N = 8
        lam, mu = rng.randint(0, 4), rng.randint(0, 2)
        D = lam + rng.choice([6, lam * N + 2])
        P = [p * rng.randrange(p**N) for _ in range(lam)] + [1]
        U = [rng.randrange(1, p)] + [rng.randrange(p**N) for _ in range(D - 1)]
        f = [p**mu * c for c in _mul_trunc(P, U, D, p**N)]
        inv = weierstrass_prepare(PowerSeriesZp(p, N + mu, f))
        mod_P = p**inv.poly_prec
        ok = (inv.lam == lam and inv.mu == mu
              and all((a - b) % mod_P == 0 for a, b in zip(inv.distinguished, P))
              and all(c % p == 0 for c in inv.distinguished[:-1])
              and reconstruct(inv).coeffs == tuple(c % p ** (N + mu) for c in f)[: inv.degree])
        checked += 1
        if not ok:
            failures.append((p, lam, mu))
    return checked, failures


CONGRUENCE_TOWERS = [(3, 2), (3, 5), (3, 10), (5, 2), (5, 3), (7, 2)]


def charpoly_congruences(bound: int = 2000):
    checked, failures = 0, []
    for p, m in CONGRUENCE_TOWERS:
        T = Tower(p, m)
        s, r = sigma(T), rho(T)
        for q in primes_upto(bound).tolist():
            if (m * p) % q == 0:
                continue
            a, b = frobenius_charpoly(s, q), frobenius_charpoly(r, q)
            checked += 1
            if len(a) != len(b) or any((int(x) - int(y)) % p for x, y in zip(a, b)):
                failures.append((p, m, q))
    return checked, failures


def frobenius_vs_factorization(bound: int = 2000):
    """Degree pattern of x^p - m modulo q against the predicted Frobenius class."""
    x = sympy.Symbol("x")
    checked, failures = 0, []
    for p, m in CONGRUENCE_TOWERS:
        T = Tower(p, m)
        for q in primes_upto(bound).tolist():
            if (m * p) % q == 0:
                continue
            cls = frobenius_class(q, T)
            _, factors = sympy.factor_list(x**p - m, modulus=q)
            degrees = sorted(sympy.degree(f, x) for f, e in factors for _ in range(e))
            if cls.order == 1:
                expected = [1] * p if cls.split_in_L else [p]
            else:
                expected = [1] + [cls.order] * ((p - 1) // cls.order)
            checked += 1
            if degrees != sorted(expected):
                failures.append((p, m, q, degrees))
    return checked, failures
