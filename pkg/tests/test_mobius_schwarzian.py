import numpy as np
import pytest

from schwarzian_lab import (DegenerateInputError, InputError, LaurentSeries, MobiusMap,
                            StructureError, orbifold_lift, orbifold_pushdown, ramified_lift,
                            schwarzian, schwarzian_from_derivative, verify_cocycle)
from schwarzian_lab.schwarzian import schwarzian_pointwise

from conftest import random_conditioned_mobius, random_map_near_identity

z = LaurentSeries.monomial(1)


def test_mobius_normalized_and_composition(rng):
    a, b = MobiusMap.random(rng), MobiusMap.random(rng)
    assert abs(a.det - 1) < 1e-12
    x = 0.3 + 0.2j
    assert abs((a @ b)(x) - a(b(x))) < 1e-12
    assert abs(a.inverse()(a(x)) - x) < 1e-12


def test_mobius_infinity_handling():
    m = MobiusMap(1, 2, 3, 4)
    assert abs(m(np.inf) - 1 / 3) < 1e-15
    assert not np.isfinite(m(-4 / 3))


def test_singular_matrix_rejected():
    with pytest.raises(DegenerateInputError):
        MobiusMap(1, 2, 2, 4)


def test_schwarzian_of_mobius_vanishes(rng):
    for _ in range(10):
        m = MobiusMap.random(rng)
        pole = -m.d / m.c
        z0 = 0.0 if abs(pole) >= 2 else pole + 2.0
        s = schwarzian(m.as_series(z0))
        assert s.is_zero or np.max(np.abs(s.coeffs)) < 1e-11


@pytest.mark.parametrize("theta", [0.5, 1 / 3, 2.0, 0.3 + 0.1j])
def test_power_schwarzian(theta):
    s = schwarzian_from_derivative(LaurentSeries.constant(theta), exponent=theta - 1)
    target = LaurentSeries.monomial(-2, (1 - theta ** 2) / 2)
    assert s.residual(target) < 1e-12


def test_log_schwarzian_is_cusp():
    s = schwarzian_from_derivative(LaurentSeries.monomial(-1))
    assert s.residual(LaurentSeries.monomial(-2, 0.5)) < 1e-15


def test_schwarzian_of_inverse_map_vanishes():
    s = schwarzian(1 / z + 0 * z)
    assert s.is_zero


def test_constant_map_rejected():
    with pytest.raises(DegenerateInputError):
        schwarzian(LaurentSeries.constant(3.0))


def test_pointwise_matches_series():
    f = z + 0.3 * z ** 3 + 0.1 * z ** 4
    s = schwarzian(f)
    x = 0.2 + 0.1j
    d1, d2, d3 = f.derivative(), f.derivative().derivative(), f.derivative().derivative().derivative()
    assert abs(schwarzian_pointwise(d1(x), d2(x), d3(x)) - s(x)) < 1e-10


@pytest.mark.parametrize("side", ["pre", "post"])
def test_cocycle_identities(rng, side):
    for _ in range(10):
        f = random_map_near_identity(rng)
        g = random_conditioned_mobius(rng, side)
        assert verify_cocycle(f, g, side) < 1e-10


def test_cocycle_rejects_bad_side():
    with pytest.raises(InputError):
        verify_cocycle(z, MobiusMap.identity(), "middle")


def test_pushdown_of_one():
    out = orbifold_pushdown(LaurentSeries.constant(1.0), 2)
    assert out.valuation == 2
    assert out.coeffs.tolist() == [4.0]


@pytest.mark.parametrize("k", [2, 3, 5])
def test_lift_inverts_pushdown(k, rng):
    xi = LaurentSeries(rng.standard_normal(5) + 1j * rng.standard_normal(5), 0)
    back = orbifold_lift(orbifold_pushdown(xi, k), k)
    assert back.valuation == xi.valuation
    assert np.array_equal(back.coeffs, xi.coeffs * (k * k) / (k * k))


def test_lift_rejects_off_lattice_exponent():
    with pytest.raises(StructureError) as info:
        orbifold_lift(LaurentSeries.monomial(3), 2)
    assert info.value.exponent == 3


@pytest.mark.parametrize("k", [2, 3, 7])
def test_ramified_lift_of_elliptic_family_is_regular(k):
    xi = LaurentSeries.monomial(-2, (1 - 1 / k ** 2) / 2)
    assert ramified_lift(xi, k).is_zero


def test_ramified_lift_keeps_cusp_pole():
    lift = ramified_lift(LaurentSeries.monomial(-2, 0.5), 3)
    assert lift.valuation == -2
