import pytest

from falsetate.elliptic import (
    ADDITIVE,
    NONSPLIT,
    SPLIT,
    ap,
    local_data_over,
    model_correction,
    parse_curve,
    periods,
    points_over,
    tamagawa_product,
    tate_local,
    torsion_order,
)
from falsetate.fieldtower import Tower

# (label, conductor, discriminant, [(q, kind, kodaira, c_q)], torsion)
LOCAL = [
    ("11A1", 11, -161051, [(11, SPLIT, "I5", 5)], 5),
    ("11A3", 11, -11, [(11, SPLIT, "I1", 1)], 5),
    ("14A1", 14, -21952, [(2, NONSPLIT, "I6", 2), (7, SPLIT, "I3", 3)], 6),
    ("21A4", 21, -63, [(3, SPLIT, "I2", 2), (7, NONSPLIT, "I1", 1)], 4),
    ("26B1", 26, -1664, [(2, SPLIT, "I7", 7), (13, NONSPLIT, "I1", 1)], 7),
    ("37A1", 37, 37, [(37, NONSPLIT, "I1", 1)], 1),
    ("20A1", 20, -6400, [(2, ADDITIVE, "IV*", 3), (5, NONSPLIT, "I2", 2)], 6),
    ("272C1", 272, 4352, [(2, ADDITIVE, "I0*", 2), (17, SPLIT, "I1", 1)], 2),
]


@pytest.mark.parametrize("label,N,disc,local,tors", LOCAL)
def test_tate_and_torsion(label, N, disc, local, tors):
    E = parse_curve(label)
    assert E.conductor == N
    assert E.discriminant == disc
    got = [(q, tate_local(E, q).kind, tate_local(E, q).kodaira, tate_local(E, q).tamagawa) for q in E.bad_primes]
    assert got == local
    assert torsion_order(E, "Q") == tors


def test_frobenius_traces():
    E = parse_curve("11A1")
    assert [ap(E, q) for q in (2, 3, 5, 7, 13)] == [-2, -1, 1, -2, 4]
    assert [ap(parse_curve("37A1"), q) for q in (5, 11, 13)] == [-2, -5, -2]


def test_point_counts_agree_with_naive():
    E = parse_curve("11A1")
    for q in (13, 17, 19, 23, 29):
        assert E.count_points_naive(q) == points_over(E, q, 1)
    assert points_over(E, 13, 2) == 180


def test_bad_prime_trace_rejected():
    with pytest.raises(ValueError):
        ap(parse_curve("11A1"), 11)


def test_parse_raw_coefficients():
    assert parse_curve("0,-1,1,0,0").conductor == 11
    assert parse_curve("[0,0,1,-1,0]").conductor == 37


@pytest.mark.parametrize("bad", ["foo", "1,2,3", "a,b,c,d,e"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_curve(bad)


def test_periods_21a4():
    P = periods(parse_curve("21A4"))
    assert abs(float(P.Omega_plus.mid) - 3.60892324311) < 1e-9
    assert abs(float(P.Omega_minus_im.mid) - 1.91098978075) < 1e-9


def test_periods_272c1_covolume():
    P = periods(parse_curve("272C1"))
    assert abs(float(P.Omega_plus.mid) * float(P.Omega_minus_im.mid) * 2 - 6.75) < 1e-3


def test_tower_local_data_21a4():
    E, T = parse_curve("21A4"), Tower(5, 2)
    assert tamagawa_product(E, "K", T) == 2
    assert tamagawa_product(E, "L", T) == 4
    assert tamagawa_product(E, "F", T) == 32
    assert torsion_order(E, "K", T) == 4 and torsion_order(E, "L", T) == 4
    (ld,) = local_data_over(E, "F", 2, T)
    assert (ld.e, ld.f, ld.kind, ld.points()) == (5, 4, "good", 16)


def test_torsion_over_f_unsupported():
    with pytest.raises(ValueError):
        torsion_order(parse_curve("21A4"), "F", Tower(5, 2))


def test_model_correction_272c1():
    corr = model_correction(parse_curve("272C1"), "L", Tower(3, 2))
    assert corr.norm == 2
    assert model_correction(parse_curve("21A4"), "F", Tower(5, 2)).norm == 1


def test_multiplicative_becomes_i3_in_ramified_cubic():
    E, T = parse_curve("11A3"), Tower(3, 11)
    (ldK,) = local_data_over(E, "K", 11, T)
    assert (ldK.kind, ldK.f) == (SPLIT, 2)
    (ldF,) = local_data_over(E, "F", 11, T)
    assert (ldF.e, ldF.kodaira, ldF.tamagawa) == (3, "I3", 3)
