import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzian_lab import InputError, LaurentSeries, SeriesDivisionError
from schwarzian_lab.series import coefficients_from_samples, sample_circle

z = LaurentSeries.monomial(1)

cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def series_strategy(min_val=-3, max_val=3):
    return st.builds(
        lambda cs, v: LaurentSeries(cs, v, order=v + 10),
        st.lists(cplx, min_size=1, max_size=6),
        st.integers(min_val, max_val),
    )


def test_exact_polynomial_product():
    p = (1 + z) * (1 - z)
    assert p.is_exact
    assert np.allclose(p.window(0, 2), [1, 0, -1])


def test_geometric_reciprocal_and_order():
    r = (1 - z).reciprocal(order=8)
    assert r.order == 8
    assert np.allclose(r.coeffs, np.ones(9))
    with pytest.raises(InputError):
        r.coefficient(9)


def test_truncation_propagates_through_product():
    a = LaurentSeries([1, 1, 1], 0, order=4)
    b = LaurentSeries([2.0], -1)
    assert (a * b).order == 3
    assert (a + b).order == 4


def test_exact_cancellation_gives_zero_series():
    assert (z - z).is_zero
    s = LaurentSeries([0.1, 0.2, 0.3])
    assert (s * 3 - 3 * s).is_zero


def test_zero_reciprocal_raises():
    with pytest.raises(SeriesDivisionError):
        LaurentSeries.zero().reciprocal()


def test_laurent_reciprocal_of_pole():
    s = LaurentSeries([2.0, 1.0], -2)
    r = s.reciprocal(order=10)
    assert r.valuation == 2
    assert (s * r).residual(LaurentSeries.constant(1.0)) < 1e-14


def test_compose_geometric_in_square():
    g = (1 - z).reciprocal(order=10)
    h = g.compose(z * z)
    assert h.order == 21
    assert np.allclose(h.window(0, 6), [1, 0, 1, 0, 1, 0, 1])


def test_compose_exact_with_pole():
    w = LaurentSeries.monomial(-1) + 0 * z
    h = w.compose(2 * z)
    assert abs(h.coefficient(-1) - 0.5) < 1e-15


def test_recenter_negative_power_uses_reflection():
    inv = LaurentSeries.monomial(-1)
    r = inv.recenter(1.0, order=6)
    assert np.allclose(r.coeffs, [(-1) ** j for j in range(7)])
    inv2 = LaurentSeries.monomial(-2)
    r2 = inv2.recenter(2.0, order=5)
    expected = [(-1) ** j * (j + 1) / 2.0 ** (j + 2) for j in range(6)]
    assert np.allclose(r2.coeffs, expected)


def test_taylor_scaled_matches_recenter():
    s = LaurentSeries([1.0, 0.5, 0.25], -2)
    p, sc = 0.3 + 0.1j, 0.07
    ref = s.recenter(p, order=12).window(0, 12) * sc ** (np.arange(13) + 2)
    got = s.taylor_scaled(p, 12, sc, shift=2)
    assert np.max(np.abs(got - ref)) < 1e-13 * np.max(np.abs(ref))


def test_taylor_scaled_near_pole_is_finite():
    s = LaurentSeries.monomial(-2, 0.5)
    c = s.taylor_scaled(1e-200, 10, 1e-200, shift=2)
    assert np.all(np.isfinite(c))
    assert abs(c[0] - 0.5) < 1e-14


def test_evaluation_matches_closed_form():
    s = LaurentSeries([1.0, 2.0, 3.0], -1)
    x = np.array([0.3, 0.5j, -0.2 + 0.1j])
    assert np.allclose(s(x), 1 / x + 2 + 3 * x)


def test_dft_coefficients_recover_laurent_polynomial():
    def f(x):
        return 1 / x + 2 + 3 * x

    vals = sample_circle(f, 0.5, 64)
    s = coefficients_from_samples(vals, 0.5, -4, 8)
    assert abs(s.coefficient(-1) - 1) < 1e-13
    assert abs(s.coefficient(0) - 2) < 1e-13
    assert abs(s.coefficient(1) - 3) < 1e-13
    assert abs(s.coefficient(3)) == 0


def test_dft_window_too_wide():
    with pytest.raises(InputError):
        coefficients_from_samples(np.ones(8), 0.5, -4, 4)


def test_json_round_trip():
    s = LaurentSeries([1 + 2j, 0, 3], -2, center=0.5, order=5)
    t = LaurentSeries.from_json(s.to_json())
    assert t.order == 5 and t.valuation == -2 and t.center == 0.5
    assert t.residual(s) == 0
    e = LaurentSeries.from_json({"valuation": 1, "coefficients": [[1, 0]]})
    assert e.is_exact


def test_malformed_json():
    with pytest.raises(InputError):
        LaurentSeries.from_json({"valuation": 0})
    with pytest.raises(InputError):
        LaurentSeries.from_json({"coefficients": [[1, 2, 3]]})


def test_centers_must_agree():
    with pytest.raises(InputError):
        LaurentSeries.monomial(1) + LaurentSeries.monomial(1, center=1.0)


def test_antiderivative_separates_log():
    s = LaurentSeries([2.0, 1.0, 3.0], -1)
    F, L = s.antiderivative_with_log()
    assert L == 2
    assert F.derivative().residual(s - LaurentSeries.monomial(-1, 2.0)) < 1e-15


@settings(max_examples=40, deadline=None)
@given(series_strategy(), series_strategy())
def test_product_commutes(a, b):
    scale = 1 + np.sum(np.abs(a.coeffs)) * np.sum(np.abs(b.coeffs))
    assert (a * b).residual(b * a) < 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(series_strategy())
def test_reciprocal_inverts(a):
    if abs(a.leading()) < 1e-2:
        return
    one = a * a.reciprocal()
    scale = max(1.0, float(np.max(np.abs(a.coeffs))) / abs(a.leading())) ** 10
    assert one.residual(LaurentSeries.constant(1.0)) < 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(series_strategy(0, 3))
def test_derivative_is_linear_and_lowers_order(a):
    d = (2 * a).derivative()
    assert d.residual(2 * a.derivative()) < 1e-12 * (1 + np.max(np.abs(a.coeffs), initial=0.0)) * 20
    assert d.order == a.order - 1
