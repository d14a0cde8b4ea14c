from fractions import Fraction

import numpy as np
import pytest

from falsetate import kernels
from falsetate.artin import decompose_sigma, rho, sigma
from falsetate.elliptic import frobenius_traces, parse_curve
from falsetate.fieldtower import Tower
from falsetate.lseries import (
    InsufficientBudget,
    InsufficientPrecision,
    character_twist_value,
    curve_root_number,
    curve_series,
    exact_coefficients,
    fe_residual,
    inverse_series,
    l_value,
    numeric_sign,
    recognize_rational,
    twist_series,
)
from falsetate.numerics import primes_upto


def test_inverse_series():
    # 1 / (1 + 2T + 5T^2) = 1 - 2T - T^2 + 12T^3 - 19T^4 + ...
    assert inverse_series((1, 2, 5), 5) == [1, -2, -1, 12, -19]


def test_recognize_rational():
    assert recognize_rational(0.3333333333333, 100, err=1e-12) == Fraction(1, 3)
    assert recognize_rational(0.125, 64, err=1e-12) == Fraction(1, 8)
    with pytest.raises(InsufficientPrecision):
        recognize_rational(0.3333333333333, 100, err=0.5)


def test_dirichlet_coefficients_21a4():
    S = curve_series(parse_curve("21A4"), 1)
    a = S.coefficients(20).tolist()
    assert a[:11] == [0, 1, -1, 1, -1, -2, -1, -1, 3, 1, 2]
    assert a[1:] == exact_coefficients(S.local_poly, 20)


def test_curve_l_values():
    E = parse_curve("11A1")
    val = l_value(curve_series(E, curve_root_number(E)), target=1e-12)
    assert abs(float(val.value.mid) - 0.2538418608559107) < 1e-12
    E21 = parse_curve("21A4")
    v21 = l_value(curve_series(E21, 1))
    assert abs(float(v21.value.mid) - 0.451115405388) < 1e-8


def test_rank_one_curve_vanishes():
    E = parse_curve("37A1")
    assert curve_root_number(E) == -1
    val = l_value(curve_series(E, -1))
    assert abs(float(val.value.mid)) < 1e-12


def test_sigma_value_is_product_of_character_twists():
    E, T = parse_curve("21A4"), Tower(5, 2)
    Ls = l_value(twist_series(E, sigma(T), 1), target=1e-8)
    prod = 1
    for chi in decompose_sigma(T):
        prod *= complex(character_twist_value(E, chi).value)
    assert abs(prod.imag) < 1e-12
    assert abs(prod.real - float(Ls.value.mid)) < 1e-9
    assert abs(float(Ls.value.mid) - 2.12709564136) < 1e-8


def test_functional_equation_residuals():
    S = twist_series(parse_curve("11A3"), rho(Tower(3, 11)), -1)
    assert fe_residual(S, 1.1, -1) < 1e-10
    assert fe_residual(S, 1.1, 1) > 1e-4
    rep = numeric_sign(S)
    assert rep.sign == -1 and rep.separation >= 1e3


def test_insufficient_budget_reports_requirement():
    S = twist_series(parse_curve("21A4"), sigma(Tower(5, 2)), 1)
    with pytest.raises(InsufficientBudget) as info:
        l_value(S, budget=100, target=1e-8)
    assert info.value.required > 100


@pytest.fixture
def python_backend():
    previous = kernels.set_backend("python")
    yield
    kernels.set_backend(previous)


def test_backends_agree_on_traces():
    E = parse_curve("21A4")
    primes = primes_upto(20000)
    primes = primes[primes > 7]
    a_cy = frobenius_traces(E, primes)
    previous = kernels.set_backend("python")
    try:
        a_py = frobenius_traces(E, primes)
    finally:
        kernels.set_backend(previous)
    assert np.array_equal(a_cy, a_py)
    assert np.all(np.abs(a_cy) <= 2 * np.sqrt(primes))


def test_backends_agree_on_l_value(python_backend):
    E = parse_curve("11A1")
    S = curve_series(E, 1)
    v_py = float(l_value(S, target=1e-12).value.mid)
    assert abs(v_py - 0.2538418608559107) < 1e-12
