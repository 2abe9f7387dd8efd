import numpy as np
import pytest

from schwarzian_lab import (AnnulusSector, FunctionMap, InputError, LaurentSeries,
                            LogDevelopingMap, MobiusMap, PowerDevelopingMap, SlitDisc,
                            accumulation_probe, koebe_witness, power_form_probe,
                            probe_injectivity)
from schwarzian_lab.developing import from_sphere, sphere_point, spherical_distance
from schwarzian_lab.probes import spherical_diameter, write_samples_csv

z = LaurentSeries.monomial(1)


def test_sphere_round_trip_and_poles():
    for w in (0.3 + 0.2j, 5 - 7j, 1e8j, 0j):
        assert abs(from_sphere(sphere_point(w)) - w) < 1e-12 * max(1, abs(w))
    assert np.allclose(sphere_point(np.inf), [0, 0, 1])
    assert abs(spherical_distance(0, np.inf) - np.pi) < 1e-15
    assert abs(spherical_distance(1, 1j) - np.pi / 2) < 1e-15


def test_spherical_diameter_of_antipodes():
    P = sphere_point(np.array([1.0, -1.0, 1j]))
    assert abs(spherical_diameter(P) - np.pi) < 1e-12


def test_sector_grid_is_symmetric_about_midline():
    s = AnnulusSector()
    pts = s.grid(9).reshape(9, 9)
    ang = np.angle(pts[0] * np.exp(-1j * (s.theta + np.pi)))
    assert abs(ang[4]) < 1e-15
    assert np.allclose(ang, -ang[::-1])
    with pytest.raises(InputError):
        AnnulusSector(r=0.5, R=0.25)


def test_slit_disc_membership():
    d = SlitDisc()
    assert d.contains(0.5) and not d.contains(-0.5j) and not d.contains(0.99)


@pytest.mark.parametrize("f", [lambda x: x, lambda x: 1 / x,
                               lambda x: MobiusMap(1, 2, 3, 7)(x)])
def test_injective_maps_pass(f):
    v = probe_injectivity(FunctionMap(f), grid_n=48)
    assert v.outcome == "pass"


def test_square_collides():
    v = probe_injectivity(FunctionMap(lambda x: x * x), grid_n=48)
    assert v.is_collision
    assert v.image_distance < 1e-10
    assert abs(v.z1 - v.z2) > 1e-3 * max(abs(v.z1), abs(v.z2))


@pytest.mark.parametrize("k0", [-2, -3])
def test_koebe_collision(k0):
    v = koebe_witness(LaurentSeries.monomial(k0), 2j * np.pi)
    assert v.is_collision


def test_koebe_needs_double_pole():
    with pytest.raises(InputError):
        koebe_witness(LaurentSeries.monomial(-1), 0)


def test_accumulation_limits():
    v = accumulation_probe(FunctionMap(lambda x: x))
    assert v.outcome == "limit" and abs(v.point) < 1e-3
    v = accumulation_probe(LogDevelopingMap(LaurentSeries.monomial(-1), 2j * np.pi))
    assert v.outcome == "limit" and spherical_distance(v.point, np.inf) < 1e-3


def test_identity_limit_is_tight():
    # image diameter at depth k is ~ 2^-k / 16; depth 20 gives ~1e-7
    v = accumulation_probe(FunctionMap(lambda x: x))
    assert v.spread < 1e-6
    v = accumulation_probe(FunctionMap(lambda x: x), depth=40)
    assert v.outcome == "limit" and v.spread < 1e-12


def test_log_map_on_wide_sector():
    dev = LogDevelopingMap(LaurentSeries.monomial(-1), 2j * np.pi)
    v = accumulation_probe(dev, AnnulusSector(0.25, 0.5, 0.0, 0.1), depth=20)
    assert v.outcome == "limit" and v.spread < 1e-3
    assert spherical_distance(v.point, np.inf) < 1e-3


@pytest.mark.parametrize("theta", [0.0, np.pi / 2, np.pi])
def test_verdict_is_sector_robust(theta):
    sec = AnnulusSector(theta=theta)
    assert accumulation_probe(FunctionMap(lambda x: x), sec).outcome == "limit"
    dev = LogDevelopingMap(LaurentSeries.monomial(-1), 2j * np.pi)
    assert accumulation_probe(dev, sec).outcome == "limit"
    assert accumulation_probe(PowerDevelopingMap(1.0, 0.5), sec).outcome == "limit"


@pytest.mark.parametrize("theta", [0.0, np.pi])
def test_essential_singularity_spread_on_real_axis_sectors(theta):
    # sin(1/z) stays bounded only along the real axis; these grids contain it
    v = accumulation_probe(FunctionMap(lambda x: np.sin(1 / x)), AnnulusSector(theta=theta))
    assert v.outcome == "spread" and v.spread > 0.5


def test_slow_power_needs_adaptive_depth():
    v = accumulation_probe(PowerDevelopingMap(1.0, 1 / 3), max_depth=160)
    assert v.outcome == "limit" and abs(v.point) < 1e-3


def test_accumulation_spread_for_essential_singularity():
    v = accumulation_probe(FunctionMap(lambda x: np.sin(1 / x)))
    assert v.outcome == "spread" and v.spread > 0.5
    v = power_form_probe(lambda x: np.sin(1 / x), 1.0)
    assert v.outcome == "spread" and v.spread > 0.3


def test_power_form_of_square_root():
    v = power_form_probe(lambda x: np.ones_like(x), 0.5)
    assert v.outcome == "limit"


def test_verdict_json_and_csv(tmp_path):
    v = accumulation_probe(PowerDevelopingMap(lambda x: 1 / x, 1.0))
    d = v.to_json()
    assert d["outcome"] in ("limit", "spread")
    path = tmp_path / "s.csv"
    write_samples_csv(path, np.array([0.1, 0.2]), np.array([1.0, np.inf]))
    lines = path.read_text().splitlines()
    assert lines[0] == "z_re,z_im,w_re,w_im" and lines[2].endswith("inf,inf")
