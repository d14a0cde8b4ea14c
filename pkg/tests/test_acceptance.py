"""End-to-end acceptance run.

Each test records one PASS/FAIL line through the ``record`` fixture; the lines
are printed in the terminal summary under "acceptance criteria".
"""

from __future__ import annotations

import math
import time

import pytest
from click.testing import CliRunner

import properties
from falsetate import cli
from falsetate.artin import rho, sigma, sign, twist_conductor, twist_conductor_factored
from falsetate.elliptic import ap, parse_curve, periods
from falsetate.epsilon import eps_rho, eps_sigma
from falsetate.fieldtower import Tower
from falsetate.iwasawa import main_theorem_report
from falsetate.lseries import numeric_sign
from falsetate.numerics import PadicNumber
from falsetate.padicl import bsd_quotient, congruence_check, twist_data, twisted_l_value, unit_root

# -- 1. golden example: 21A4, p = 5, m = 2 ----------------------------------

GOLDEN_L = {"E": 0.451115405388, "sigma": 2.12709564136, "rho": 1.70167651313}
REFERENCE_SIGMA_DIGITS = [4, 0, 3, 1]
REFERENCE_RHO_DIGITS = [4, 2, 2, 4]


def test_golden_conductors(record, e21, t52):
    got = (t52.N_sigma, t52.N_rho, twist_conductor_factored(e21, sigma(t52)), twist_conductor_factored(e21, rho(t52)))
    want = (5**3, 2**4 * 5**5, {3: 4, 5: 6, 7: 4}, {2: 8, 3: 4, 5: 10, 7: 4})
    assert record("1 conductors N(sigma), N(rho), N(E,sigma), N(E,rho)", got == want, str(got[:2]))


def test_golden_l_values(record, e21, t52):
    start = time.time()
    got = {
        "E": twisted_l_value(e21, None).value,
        "sigma": twisted_l_value(e21, sigma(t52)).value,
        "rho": twisted_l_value(e21, rho(t52)).value,
    }
    errors = {k: abs(float(v.mid) - GOLDEN_L[k]) for k, v in got.items()}
    ok = all(e < 1e-8 for e in errors.values()) and all(float(v.err) < 1e-8 for v in got.values())
    detail = ", ".join(f"{k} {float(v.mid):.12f}" for k, v in got.items()) + f"; {time.time() - start:.0f} s"
    assert record("1 L-values of E, E x sigma, E x rho to 1e-8", ok, detail)


def test_golden_periods(record, e21):
    P = periods(e21)
    ok = abs(float(P.Omega_plus.mid) - 3.60892324311) < 1e-9 and abs(float(P.Omega_minus_im.mid) - 1.91098978075) < 1e-9
    assert record("1 periods to 1e-9", ok, f"{float(P.Omega_plus.mid):.11f}, {float(P.Omega_minus_im.mid):.11f}i")


def test_golden_sha(record, e21, t52):
    reps = {fld: bsd_quotient(e21, fld, None if fld == "Q" else t52) for fld in "QKL"}
    ok = all(r.sha == 1 and abs(float(r.sha_real.mid) - 1) < 1e-6 for r in reps.values())
    detail = ", ".join(f"{k} {float(r.sha_real.mid):.10f}" for k, r in reps.items())
    assert record("1 analytic Sha = 1 over Q, K, L", ok, detail)


def test_golden_epsilon(record, t52):
    got = (str(eps_sigma(t52)), str(eps_rho(t52)))
    assert record("1 epsilon factors exact", got == ("-5^{3/2}", "-5^{5/2}"), ", ".join(got))


def test_golden_unit_root(record, e21):
    u, _ = unit_root(e21, 5, 10)
    a5 = ap(e21, 5)
    residual = u * u - u * a5 + 5
    ok = u.digits()[:4] == [3, 2, 4, 2] and residual.is_zero() and u.prec >= 10
    assert record("1 unit root u to O(5^10)", ok, " ".join(map(str, u.digits()[:10])))


def test_golden_rho_digits_and_congruence(record, golden_congruence):
    rep = golden_congruence
    ok = rep.rho.value == PadicNumber.from_digits(5, REFERENCE_RHO_DIGITS, 4) and rep.congruent
    detail = f"L(rho) = {rep.rho.value}, L(sigma) = {rep.sigma.value}, depth {rep.depth}"
    assert record("1 p-adic L(rho) digit-exact and L(sigma) = L(rho) mod 5", ok, detail)


@pytest.mark.xfail(strict=True, reason="the reference digit at 5^3 is 1; the displayed factors of the same value give 2")
def test_golden_sigma_digits(record, golden_congruence):
    value = golden_congruence.sigma.value
    ok = value == PadicNumber.from_digits(5, REFERENCE_SIGMA_DIGITS, 4)
    record("1 p-adic L(sigma) digit-exact", ok,
           f"computed {value.digits()[:4]}, reference {REFERENCE_SIGMA_DIGITS}; the reference factors "
           "L* = 1/8, eps = -5^(3/2), u^-3 and the Euler factors multiply to digit 2 at 5^3")
    assert ok


def test_golden_main_theorem(record, e21, t52, golden_congruence):
    rep = golden_congruence
    ls, lr = rep.sigma.l_star, rep.rho.l_star
    mt = main_theorem_report(e21, t52, ls, lr, computed=(rep.sigma.valuation(), rep.rho.valuation()))
    c = mt.chi
    vals = (c.chi_cyc_K, c.chi_cyc_F, c.chi_na_K, c.chi_na_F, c.chi_na_sigma, c.chi_na_rho)
    ok = (ls, lr) == (1 / 8, 2) and vals == (0,) * 6 and mt.consistent and mt.matches
    assert record("1 chi valuations 0 and the biconditional report consistent", ok,
                  f"L*(sigma) = {ls}, L*(rho) = {lr}, chi {vals}")


# -- 2. additive reduction: 272C1, p = 3, m = 2 ------------------------------


def test_additive_example(record):
    E, T = parse_curve("272C1"), Tower(3, 2)
    rep = bsd_quotient(E, "L", T)
    uncorrected = float(rep.quotient.mid) * rep.inputs["torsion"] ** 2 / rep.inputs["tamagawa"]
    ok = abs(uncorrected - 2) < 1e-5 and rep.sha == 1 and rep.inputs["model_correction"] == 2
    assert record("2 272C1: uncorrected quotient 2, Sha = 1 with Norm(A) = 2", ok,
                  f"quotient {uncorrected:.8f}, Norm(A) {rep.inputs['model_correction']}, Sha {rep.sha}")


# -- 3. sign cross-validation ------------------------------------------------

SIGN_RUNS = [
    ("11A3", 3, 11, "rho", -1),
    ("11A1", 3, 2, "rho", None),
    ("11A1", 3, 5, "rho", None),
    ("11A1", 3, 7, "rho", None),
    ("19A1", 3, 2, "rho", -1),
    ("37A1", 3, 2, "rho", -1),
    ("14A1", 3, 5, "rho", None),
    ("21A4", 3, 2, "rho", -1),
    ("26A1", 3, 5, "rho", None),
    ("17A1", 3, 10, "rho", None),
    ("11A1", 5, 2, "sigma", None),
    ("21A4", 5, 2, "sigma", None),
]


def test_sign_cross_validation(record):
    results = []
    for label, p, m, kind, expected in SIGN_RUNS:
        E, T = parse_curve(label), Tower(p, m)
        tau = sigma(T) if kind == "sigma" else rho(T)
        formula = sign(E, tau)
        num = numeric_sign(twist_data(E, tau).series, margin=1e3)
        ok = num.sign == formula and (expected is None or expected == formula)
        results.append((ok, num.separation))
    ok = len(results) >= 10 and all(r[0] for r in results)
    assert record("3 formula sign = numeric sign", ok,
                  f"{sum(r[0] for r in results)}/{len(results)} runs, min separation {min(r[1] for r in results):.1e}")


# -- 4. property suites ------------------------------------------------------

PROPERTY_SUITES = [
    ("4 Artin local identities, q < 1000, 5 curves", properties.artin_local_identities),
    ("4 Gauss sum magnitudes exactly sqrt(p), p in 3, 5, 7", properties.gauss_sum_magnitudes),
    ("4 unit-root Euler product residual 0, 100 ordinary pairs", properties.lemuzhas_residuals),
    ("4 Weierstrass preparation round trip, 500 series", properties.weierstrass_round_trips),
    ("4 charpoly(sigma) = charpoly(rho) mod p, q < 2000", properties.charpoly_congruences),
    ("4 Frobenius class against factorization of x^p - m, q < 2000", properties.frobenius_vs_factorization),
]


@pytest.mark.filterwarnings("ignore::DeprecationWarning")
@pytest.mark.parametrize("name,suite", PROPERTY_SUITES, ids=[n[2:] for n, _ in PROPERTY_SUITES])
def test_property_suite(record, name, suite):
    checked, failures = suite()
    assert record(name, checked > 0 and not failures, f"{checked} cases, {len(failures)} failures")


# -- 5. p = 3 table shape ----------------------------------------------------

P3_TABLE = [("11A1", m) for m in (2, 5, 7, 10, 13, 14, 20)]


def test_p3_table_shape(record):
    rows = []
    for label, m in P3_TABLE:
        E, T = parse_curve(label), Tower(3, m)
        conductor = twist_conductor(E, rho(T))
        bsd = bsd_quotient(E, "L", T)
        cong = congruence_check(E, T)
        sha_ok = (bsd.sha is not None and bsd.sha.denominator == 1
                  and math.isqrt(bsd.sha.numerator) ** 2 == bsd.sha.numerator
                  and abs(float(bsd.sha_real.mid) - float(bsd.sha)) < 1e-4)
        rows.append((m, conductor < 10**10 and sha_ok and cong.congruent, bsd.sha))
    ok = len(rows) >= 5 and all(r[1] for r in rows)
    assert record("5 p = 3 rows: square Sha and the congruence mod 3", ok,
                  ", ".join(f"m={m} Sha={s}" for m, _, s in rows))


# -- 6. p = 7 label ----------------------------------------------------------


def test_p7_unverified_label(record):
    res = CliRunner().invoke(cli.main, ["congruence", "--curve", "11A1", "--p", "7", "--m", "2"])
    assert record("6 p = 7 output labelled unverified", "unverified" in res.output, f"exit {res.exit_code}")
