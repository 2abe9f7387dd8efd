import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def theta_xi(theta):
    from schwarzian_lab import LaurentSeries

    return LaurentSeries.monomial(-2, (1 - theta ** 2) / 2.0)


def random_map_near_identity(rng):
    """``z + sum a_n z**n`` with geometrically small random ``a_n``; univalent
    well beyond the unit disc."""
    from schwarzian_lab import LaurentSeries

    n = np.arange(2, 8)
    a = 0.1 * 2.0 ** (-n) * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
    return LaurentSeries.monomial(1) + LaurentSeries(a, 2)


def random_conditioned_mobius(rng, side):
    """Random Möbius map whose pole stays at distance >= 2 from the expansion
    disc of the cocycle identity (rejection sampling)."""
    from schwarzian_lab import MobiusMap

    while True:
        g = MobiusMap.random(rng)
        pole = -g.d / g.c
        if side == "post" and abs(pole) >= 2:
            return g
        if side == "pre":
            z0 = g.inverse()(0.0)
            if np.isfinite(z0) and abs(z0 - pole) >= 2:
                return g
