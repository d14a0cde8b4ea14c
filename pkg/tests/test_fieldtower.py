import pytest
import sympy

from falsetate.fieldtower import (
    Tower,
    UnsupportedError,
    cyclotomic_roots_mod,
    disc_pure_field,
    frobenius_class,
    kummer_local,
    kummer_symbol,
    legendre,
    multiplicative_order,
    p_power_free,
    prime_decomposition,
    rho_conductor,
)


def test_legendre():
    assert legendre(79, 3) == 1
    assert legendre(2, 5) == -1
    for q in (2, 3, 7, 11, 13, 19):
        euler = pow(q, 2, 5)
        assert legendre(q, 5) == (1 if euler == 1 else -1)


def test_multiplicative_order():
    assert multiplicative_order(2, 5) == 4
    assert multiplicative_order(11, 5) == 1
    assert multiplicative_order(2, 7) == 3


def test_tower_validation():
    with pytest.raises(UnsupportedError):
        Tower(2, 3)
    with pytest.raises(UnsupportedError):
        Tower(5, 1)
    with pytest.raises(UnsupportedError):
        Tower(3, 24)  # 24 = 3 * 2^3
    assert not p_power_free(32, 5) and p_power_free(16, 5)


@pytest.mark.parametrize("p,m,behavior", [(3, 10, "split"), (3, 3, "ramified"), (3, 2, "ramified"), (5, 2, "ramified")])
def test_kummer_local_behavior(p, m, behavior):
    assert kummer_local(p, m).behavior == behavior


@pytest.mark.parametrize("p,m", [(3, 2), (3, 5), (3, 10), (5, 2), (5, 3), (7, 2), (5, 6)])
def test_rho_conductor_is_pure_field_discriminant(p, m):
    T = Tower(p, m)
    assert rho_conductor(T) == T.N_rho == abs(disc_pure_field(p, m))


def test_pure_field_discriminant_against_sympy():
    x = sympy.Symbol("x")
    for p, m in [(3, 2), (3, 5), (5, 2), (5, 3)]:
        K = sympy.polys.numberfields.basis.round_two(sympy.Poly(x**p - m, x))
        assert abs(disc_pure_field(p, m)) == abs(K[1])


def test_golden_conductors():
    T = Tower(5, 2)
    assert T.N_sigma == 5**3
    assert T.N_rho == 2**4 * 5**5


def test_frobenius_class_examples():
    T = Tower(5, 2)
    assert not frobenius_class(11, T).split_in_L
    assert frobenius_class(151, T).totally_split
    assert frobenius_class(3, T).order == 4


def test_kummer_symbol_split_iff_trivial():
    T = Tower(5, 2)
    for q in sympy.primerange(7, 500):
        if q % 5 == 1:
            roots = cyclotomic_roots_mod(5, q)
            symbols = [kummer_symbol(q, r, T) for r in roots]
            assert all((c == 0) == frobenius_class(q, T).split_in_L for c in symbols)
    assert kummer_symbol(151, cyclotomic_roots_mod(5, 151)[0], T) == 0
    assert kummer_symbol(11, cyclotomic_roots_mod(5, 11)[0], T) != 0


def test_prime_decomposition_degrees():
    T = Tower(5, 2)
    for fld, deg in (("K", 4), ("L", 5), ("F", 20)):
        for q in (2, 3, 5, 7, 11, 31, 151):
            assert sum(e * f for e, f in prime_decomposition(q, fld, T)) == deg
