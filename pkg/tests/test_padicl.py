from fractions import Fraction

import pytest

from falsetate.elliptic import parse_curve
from falsetate.fieldtower import Tower, UnsupportedError
from falsetate.numerics import PadicNumber
from falsetate.padicl import (
    bsd_quotient,
    congruence_check,
    curly_l,
    denominator_bound,
    l_star,
    lemuzhas_check,
    twist_data,
    unit_root,
)
from falsetate.artin import rho
from properties import ordinary_pairs


def test_bsd_over_q():
    rep = bsd_quotient(parse_curve("11A1"))
    assert rep.sha == 1 and rep.verified
    assert rep.l_star == Fraction(1, 5)
    rep21 = bsd_quotient(parse_curve("21A4"))
    assert rep21.sha == 1
    assert rep21.l_star == Fraction(1, 8)


def test_bsd_rank_positive():
    rep = bsd_quotient(parse_curve("37A1"))
    assert rep.rank_positive and rep.sha is None


def test_bsd_over_k_21a4():
    rep = bsd_quotient(parse_curve("21A4"), "K", Tower(5, 2))
    assert rep.sha == 1 and rep.l_star == Fraction(1, 8)


def test_denominator_bound():
    assert denominator_bound(0.0) == 10**4
    assert denominator_bound(1e-6) == 500
    assert denominator_bound(1.0) == 1


def test_unit_root_21a4():
    u, w = unit_root(parse_curve("21A4"), 5, 10)
    assert u.digits()[:4] == [3, 2, 4, 2]
    with pytest.raises(UnsupportedError):
        unit_root(parse_curve("21A4"), 7, 10)


# (curve, m, L_E(sigma), L_E(rho), Sha over L)
P3_ROWS = [
    ("11A1", 2, [1, 1, 1, 1], [1, 1, 0, 2], 1),
    ("11A1", 5, [1, 2, 0, 2], [1, 0, 0, 1], 4),
    ("11A1", 7, [2, 2, 0, 2], [2, 1, 0, 0], 1),
    ("11A1", 10, [2, 0, 0, 2], [2, 2, 2, 2], 1),
]


@pytest.mark.parametrize("label,m,ds,dr,sha", P3_ROWS)
def test_p3_rows(label, m, ds, dr, sha):
    E, T = parse_curve(label), Tower(3, m)
    rep = congruence_check(E, T, prec=4)
    assert rep.sigma.value == PadicNumber.from_digits(3, ds, 4)
    assert rep.rho.value == PadicNumber.from_digits(3, dr, 4)
    assert rep.congruent
    assert bsd_quotient(E, "L", T).sha == sha


def test_vanishing_rho_value_is_zero():
    E, T = parse_curve("14A1"), Tower(3, 5)
    c = curly_l(E, "rho", T)
    assert c.vanishes and c.value.is_zero()
    assert bsd_quotient(E, "L", T).rank_positive


def test_l_star_sign_and_value():
    E, T = parse_curve("11A1"), Tower(3, 2)
    value, sgn, L = l_star(E, rho(T))
    assert value == 5 and sgn in (1, -1)


def test_additive_ramified_twist_resolved_numerically():
    E, T = parse_curve("272C1"), Tower(3, 2)
    data = twist_data(E, rho(T))
    assert data.sign_source == "numeric"
    assert data.series.conductor == 2**8 * 3**6 * 17**2
    rep = bsd_quotient(E, "L", T)
    assert rep.sha == 1
    assert abs(float(rep.quotient.mid) * rep.inputs["torsion"] ** 2 / rep.inputs["tamagawa"] - 2) < 1e-5


def test_p7_output_is_labelled_unverified():
    c = curly_l(parse_curve("11A1"), "sigma", Tower(7, 2), target=1e-6)
    assert "unverified" in c.flags


def test_lemuzhas_residual_zero_small_sample():
    for E, p, delta in ordinary_pairs(20):
        assert lemuzhas_check(E, delta, p) == 0
