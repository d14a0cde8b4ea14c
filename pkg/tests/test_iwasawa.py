import inspect
import random
from fractions import Fraction

import pytest

from falsetate.artin import InconsistencyError, sigma, sign
from falsetate.elliptic import parse_curve
from falsetate.fieldtower import Tower, UnsupportedError
from falsetate.iwasawa import (
    PowerSeriesZp,
    Provenanced,
    _mul_trunc,
    analytic_chi_cyc_ord,
    bad_sets,
    chi_cyc_ord,
    chi_na_ord,
    chi_na_twists,
    hk_rank_parity,
    lambda_hm,
    main_theorem_report,
    primes_in_cyclotomic,
    reconstruct,
    regularity_report,
    root_number_rho_n,
    weierstrass_prepare,
)
from falsetate.numerics import PadicNumber

ASSUMED_ZERO = Provenanced(0, "assumed")


def _ord5(n: int) -> int:
    v = 0
    while n % 5 == 0:
        n //= 5
        v += 1
    return v


@pytest.fixture(scope="module")
def golden():
    return parse_curve("21A4"), Tower(5, 2)


# -- Weierstrass preparation --------------------------------------------------


def test_prepare_constant_p():
    inv = weierstrass_prepare(PowerSeriesZp(5, 8, [5, 0, 0, 0]))
    assert (inv.mu, inv.lam) == (1, 0)


def test_prepare_cyclotomic():
    p = 5
    coeffs = [0, 5, 10, 10, 5, 1, 0, 0]  # (1+T)^5 - 1
    inv = weierstrass_prepare(PowerSeriesZp(p, 10, coeffs))
    assert (inv.mu, inv.lam) == (0, 5)
    assert inv.distinguished == (0, 5, 10, 10, 5, 1)


def test_prepare_constructed_quadratic():
    p, N = 3, 10
    rng = random.Random(2)
    unit = [1 + 3 * rng.randrange(100)] + [rng.randrange(3**N) for _ in range(11)]
    f = _mul_trunc([p, p, 1], unit, 12, 3**N)
    inv = weierstrass_prepare(PowerSeriesZp(p, N, f))
    assert (inv.mu, inv.lam) == (0, 2)
    assert all(c % p == 0 for c in inv.distinguished[:-1])
    assert all((a - b) % p**inv.poly_prec == 0 for a, b in zip(inv.distinguished, (p, p, 1)))


def test_prepare_value_at_zero():
    # ord f(0) = mu + ord P(0)
    p = 5
    f = _mul_trunc([25, 5, 1], [2, 1, 3, 0, 0, 0, 0, 0], 8, 5**8)
    series = PowerSeriesZp(p, 8, [5 * c for c in f])
    inv = weierstrass_prepare(series)
    assert inv.mu == 1 and inv.lam == 2
    ord_f0 = _ord5(series.value_at_zero())
    assert ord_f0 == 3 == inv.mu + _ord5(inv.distinguished[0])


def test_prepare_zero_series_needs_precision():
    with pytest.raises(ArithmeticError, match="precision"):
        weierstrass_prepare(PowerSeriesZp(3, 4, [0, 81, 0]))


def test_prepare_roundtrip_small():
    rng = random.Random(4)
    for _ in range(50):
        p = rng.choice([3, 5, 7])
        lam, mu = rng.randint(0, 3), rng.randint(0, 2)
        D = lam * 9 + 3
        P = [p * rng.randrange(p**8) for _ in range(lam)] + [1]
        U = [rng.randrange(1, p)] + [rng.randrange(p**8) for _ in range(D - 1)]
        f = [p**mu * c for c in _mul_trunc(P, U, D, p**8)]
        inv = weierstrass_prepare(PowerSeriesZp(p, 8 + mu, f))
        assert (inv.lam, inv.mu) == (lam, mu)
        assert reconstruct(inv).coeffs == tuple(c % p ** (8 + mu) for c in f)[: inv.degree]


# -- Euler characteristics ---------------------------------------------------


def test_bad_sets_empty_for_golden(golden):
    E, T = golden
    assert bad_sets(E, "K", T).empty and bad_sets(E, "F", T).empty


def test_bad_sets_split_multiplicative_member():
    E, T = parse_curve("11A3"), Tower(5, 11)
    sets = bad_sets(E, "K", T)
    assert [b.q for b in sets.P1] == [11] and sets.P1[0].contribution > 0


def test_bad_sets_p2_matches_local_factor_valuation():
    E = parse_curve("21A4")
    for q in (41, 43, 53, 73):
        sets = bad_sets(E, "K", Tower(5, q))
        assert sets.P2 and all(b.contribution > 0 for b in sets.P2)
    assert bad_sets(E, "K", Tower(5, 11)).empty


def test_chi_cyc_from_group_orders(golden):
    E, T = golden
    assert chi_cyc_ord(E, "K", T, Provenanced(0, "BSD-analytic"), 0, 2) == 0


def test_chi_cyc_analytic(golden):
    E, T = golden
    assert analytic_chi_cyc_ord(E, "K", T, Fraction(1, 8)) == 0
    assert analytic_chi_cyc_ord(E, "F", T, Fraction(1, 8) * Fraction(2) ** 4) == 0
    with pytest.raises(UnsupportedError):
        analytic_chi_cyc_ord(E, "K", T, Fraction(0))


def test_chi_na_and_twists(golden):
    E, T = golden
    assert chi_na_ord(E, "K", T, 0) == (0, [])
    assert chi_na_twists(0, 0, 5) == (0, 0)
    assert chi_na_twists(1, 9, 5) == (1, 2)
    with pytest.raises(InconsistencyError):
        chi_na_twists(0, 3, 5)


def test_chi_na_p3_flagged():
    _, flags = chi_na_ord(parse_curve("11A1"), "K", Tower(3, 2), 0)
    assert any("chi'_na" in f for f in flags)


def test_provenance_is_validated():
    with pytest.raises(ValueError):
        Provenanced(0, "guess")


# -- lambda, root numbers, parity --------------------------------------------


def test_lambda_golden(golden):
    rep = lambda_hm(*golden, ASSUMED_ZERO)
    assert rep.lam_F == 0 and rep.unchanged


def test_lambda_grows_at_ramified_split_prime():
    E, T = parse_curve("11A3"), Tower(5, 11)
    rep = lambda_hm(E, T, ASSUMED_ZERO)
    assert rep.V1 > 0 and rep.lam_F > 0 and not rep.unchanged
    rep1 = lambda_hm(E, T, Provenanced(1, "assumed"))
    assert rep1.lam_F > 5 * 1


def test_lambda_unsupported_for_additive_at_p3():
    with pytest.raises(UnsupportedError):
        lambda_hm(parse_curve("20A1"), Tower(3, 2), ASSUMED_ZERO)


def test_primes_in_cyclotomic():
    assert primes_in_cyclotomic(11, 5) == 1
    assert primes_in_cyclotomic(251, 5) == 25  # 250 = 2 * 5^3


def test_root_number_golden(golden):
    E, T = golden
    rep = root_number_rho_n(E, T)
    assert rep.w_rho == 1 and rep.S == () and rep.w_K == sign(E, sigma(T))


def test_root_number_11a3():
    rep = root_number_rho_n(parse_curve("11A3"), Tower(3, 11))
    assert rep.w_rho == -1 and rep.rank_bound == 2


def test_root_number_has_no_layer_parameter():
    assert "n" not in inspect.signature(root_number_rho_n).parameters


def test_parity_golden(golden):
    assert hk_rank_parity(*golden, ASSUMED_ZERO).h == 0


def test_parity_matches_lambda_plus_s2():
    for label, p, m in [("11A3", 3, 11), ("11A3", 5, 11), ("14A1", 5, 7), ("26B1", 3, 13)]:
        rep = hk_rank_parity(parse_curve(label), Tower(p, m), Provenanced(1, "assumed"))
        assert rep.parity == (1 + len(rep.S2)) % 2


# -- reports -----------------------------------------------------------------


def test_main_theorem_golden(golden):
    E, T = golden
    rep = main_theorem_report(E, T, Fraction(1, 8), Fraction(2), computed=(0, 0))
    assert rep.sigma_side and rep.rho_side and rep.consistent and rep.matches
    assert rep.predicted == (0, 0)
    assert rep.hypotheses["mu(E/K) = 0"] == "assumed"


def test_regularity(golden):
    E, T = golden
    assert regularity_report(E, T, PadicNumber.from_rational(4, 5, 4)).regular
    assert not regularity_report(E, T, PadicNumber.from_rational(5, 5, 4)).regular


def test_regularity_non_unit_a_m():
    rep = regularity_report(parse_curve("21A4"), Tower(5, 41), PadicNumber.from_rational(5, 5, 4))
    assert rep.A_m_ord > 0 and not rep.regular
