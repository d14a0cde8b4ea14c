import random

import pytest

from falsetate.artin import decompose_sigma
from falsetate.epsilon import (
    LocalSymbol,
    additive_character,
    default_uniformizer,
    eps_rho,
    eps_sigma,
    gauss_eps_chi,
    sqrt_p,
    trace_K,
)
from falsetate.fieldtower import Tower
from falsetate.numerics import CycloNumber

GOLDEN = [
    ((5, 2), "-5^{3/2}", "-5^{5/2}"),
    ((3, 2), "i*3^{1/2}", "i*3^{3/2}"),
    ((3, 5), "i*3^{1/2}", "i*3^{3/2}"),
    ((3, 10), "i*3^{1/2}", "i*3^{1/2}"),  # p splits in F/K: trivial ratio
    ((3, 3), "i*3^{1/2}", "i*3^{5/2}"),
    ((7, 2), "-i*7^{5/2}", "-i*7^{7/2}"),
]


@pytest.mark.parametrize("pm,sig,rh", GOLDEN)
def test_epsilon_values(pm, sig, rh):
    T = Tower(*pm)
    assert str(eps_sigma(T)) == sig
    assert str(eps_rho(T)) == rh


@pytest.mark.parametrize("pm", [(5, 2), (3, 2), (3, 5), (7, 2)])
def test_epsilon_magnitudes(pm):
    T = Tower(*pm)
    p = T.p
    from falsetate.artin import rho, sigma

    assert eps_sigma(T).magnitude_squared == p ** sigma(T).n_tau
    assert eps_rho(T).magnitude_squared == p ** rho(T).n_tau


@pytest.mark.parametrize("pm", [(5, 2), (3, 2), (3, 5)])
def test_uniformizer_invariance(pm):
    T = Tower(*pm)
    z = CycloNumber.zeta(T.p)
    assert str(eps_rho(T, pi=z - z**2)) == str(eps_rho(T))


def test_sqrt_p_squares():
    for p in (3, 5, 7, 11):
        s = sqrt_p(p)
        assert (s * s).rational_value() == p


def test_gauss_sums_have_exact_magnitude():
    for p in (3, 5, 7):
        for chi in decompose_sigma(Tower(p, 2))[1:]:
            assert gauss_eps_chi(chi).magnitude_squared == p


def test_trace_and_additive_character():
    z = CycloNumber.zeta(5)
    assert trace_K(z, 5) == -1
    assert trace_K(CycloNumber.rational(1, 5), 5) == 4
    assert additive_character(trace_K(CycloNumber.rational(1, 5), 5)).rational_value() == 1


@pytest.mark.parametrize("pm", [(5, 2), (3, 2), (3, 5), (5, 6)])
def test_local_symbol_is_character_of_conductor_n(pm):
    T = Tower(*pm)
    p = T.p
    pi = default_uniformizer(p)
    S = LocalSymbol(T, pi)
    rng = random.Random(11)

    def rand() -> CycloNumber:
        while True:
            x = CycloNumber(p, [rng.randint(-3, 3) for _ in range(p - 1)])
            if not x.is_zero():
                return x

    for _ in range(25):
        x, y = rand(), rand()
        assert (S(x) + S(y) - S(x * y)) % p == 0
        assert S(1 + pi**T.n_psi * rand()) == 0
