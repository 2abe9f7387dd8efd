import numpy as np
import pytest

from schwarzian_lab import (FundamentalPair, InputError, LaurentSeries, NumericalFailure,
                            PathSpec, Tolerances, XiField, continue_along_path,
                            developing_quotient, local_solution_basis, variation_of_parameters)

from conftest import theta_xi


def test_local_basis_for_constant_coefficient():
    # u'' - u = 0: cosh and sinh
    u1, u2 = local_solution_basis(LaurentSeries.constant(-2.0), 10)
    x = 0.3
    assert abs(u1(x) - np.cosh(x)) < 1e-12
    assert abs(u2(x) - np.sinh(x)) < 1e-12


def test_local_basis_rejects_pole():
    with pytest.raises(InputError):
        local_solution_basis(LaurentSeries.monomial(-2, 0.5))


def test_zero_coefficient_gives_identity_monodromy():
    res = continue_along_path(LaurentSeries.zero(), PathSpec.circle(0.5))
    assert np.max(np.abs(res.transfer_matrix - np.eye(2))) < 1e-12


def test_polyline_against_closed_form():
    # xi = -2: u1 = cosh(z - z0), u2 = sinh(z - z0)
    path = PathSpec.polyline([0.1, 0.4 + 0.3j, 1.0 + 0.5j])
    end, _ = continue_along_path(LaurentSeries.constant(-2.0), path)
    d = (1.0 + 0.5j) - 0.1
    assert abs(end.u1 - np.cosh(d)) < 1e-11
    assert abs(end.u2p - np.cosh(d)) < 1e-11
    assert abs(end.u2 - np.sinh(d)) < 1e-11


@pytest.mark.parametrize("theta", [0.2, 1 / 3, 0.5, 0.3 + 0.1j])
def test_theta_family_trace(theta):
    res = continue_along_path(theta_xi(theta), PathSpec.circle(0.5))
    tr2 = res.transfer.trace_squared()
    assert abs(tr2 - 4 * np.cos(np.pi * theta) ** 2) < 1e-8


def test_drift_diagnostics_small():
    res = continue_along_path(theta_xi(0.3), PathSpec.circle(0.5), min_steps=64)
    assert res.wronskian_drift < 1e-9
    assert res.det_drift < 1e-10
    assert res.steps >= 64


def test_step_refinement_stable():
    a = continue_along_path(theta_xi(0.3), PathSpec.circle(0.5), min_steps=64)
    b = continue_along_path(theta_xi(0.3), PathSpec.circle(0.5), min_steps=128)
    assert np.max(np.abs(a.end.matrix - b.end.matrix)) < 1e-9


def test_path_through_singularity_rejected():
    with pytest.raises(InputError):
        continue_along_path(theta_xi(0.3), PathSpec.polyline([0.5, -0.5]))


def test_start_pair_must_match_path():
    with pytest.raises(InputError):
        continue_along_path(theta_xi(0.3), PathSpec.circle(0.5),
                            start=FundamentalPair.standard(0.4))


def test_step_collapse_reported():
    tol = Tolerances(continuation_tol=1e-300, min_step=1e-3)
    with pytest.raises(NumericalFailure):
        continue_along_path(theta_xi(0.3), PathSpec.circle(0.5), tolerances=tol)


def test_path_json_round_trip():
    for p in (PathSpec.circle(0.3, 0.1j, 0.2, 2, -1), PathSpec.polyline([0.1, 0.2j, 0.5])):
        assert PathSpec.from_json(p.to_json()) == p
    with pytest.raises(InputError):
        PathSpec.from_json({"kind": "spiral"})


def test_callable_field_matches_series():
    xi = theta_xi(0.25)
    f = XiField(func=lambda z: xi(z), singularities=[0])
    a = continue_along_path(xi, PathSpec.circle(0.5)).transfer_matrix
    b = continue_along_path(f, PathSpec.circle(0.5)).transfer_matrix
    assert np.max(np.abs(a - b)) < 1e-9


def test_quotient_of_power_family_is_power():
    # u1 = z^{(1+t)/2}, u2 = z^{(1-t)/2} have quotient z^t
    t = 0.4
    xi = theta_xi(t)
    b = 0.5
    e1, e2 = (1 + t) / 2, (1 - t) / 2
    Y = np.array([[b ** e1, b ** e2], [e1 * b ** (e1 - 1), e2 * b ** (e2 - 1)]])
    dev = developing_quotient(FundamentalPair.from_matrix(b, Y), xi, theta=np.pi)
    z = np.array([0.3 + 0.2j, -0.1 + 0.4j, 0.05 - 0.2j, 1e-6 * (1 + 1j)])
    assert np.max(np.abs(dev.evaluate(z) / z ** t - 1)) < 1e-9


@pytest.mark.parametrize("theta", [1 / 3, 0.5, 0.0])
def test_schwarzian_round_trip(theta):
    dev = developing_quotient(FundamentalPair.standard(0.5), theta_xi(theta))
    pts = [0.3 + 0.2j, -0.4 + 0.1j, 0.05j, 1e-8 * (1 + 1j)]
    assert dev.schwarzian_residual(pts) < 1e-8


def test_on_circle_is_continuous_branch():
    dev = developing_quotient(FundamentalPair.standard(0.5), theta_xi(0.5))
    ang, w = dev.on_circle(0.5, 32, turns=2)
    assert len(w) == 65
    T = continue_along_path(theta_xi(0.5), PathSpec.circle(0.5)).transfer_matrix
    # continued pair is (u1, u2) T, so the quotient moves by the transpose action
    k = np.arange(1, 32)
    moved = (T[0, 0] * w[k] + T[1, 0]) / (T[0, 1] * w[k] + T[1, 1])
    assert np.max(np.abs(moved - w[k + 32]) / (1 + np.abs(w[k]))) < 1e-8


def test_variation_of_parameters_examples():
    z = LaurentSeries.monomial(1)
    res = variation_of_parameters(LaurentSeries.constant(1.0), 0.5)
    assert abs(res(0.7)) - 0.2 < 1e-14
    res = variation_of_parameters(LaurentSeries.constant(1.0), 1.0, exponent=0.25)
    assert abs(res.exponent + 0.5) < 1e-14
    assert res.F.residual(2 * z) < 1e-14
    res = variation_of_parameters(LaurentSeries.constant(1.0), 1.0, exponent=0.5)
    assert abs(res.log_coef - 1) < 1e-14
    assert res.F.is_zero
    assert abs(res(np.e)) - 1 < 1e-14


def test_variation_rejects_zero_in_patch():
    z = LaurentSeries.monomial(1)
    with pytest.raises(InputError):
        variation_of_parameters(1 - 2 * z, 0.1, patch_radius=1.0)
