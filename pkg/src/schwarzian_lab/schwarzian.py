"""Schwarzian derivatives, Möbius cocycle checks and orbifold coordinate changes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ZERO_THRESHOLD
from .errors import DegenerateInputError, InputError, StructureError
from .mobius import MobiusMap
from .series import LaurentSeries

__all__ = [
    "QuadraticDifferential",
    "schwarzian",
    "schwarzian_from_derivative",
    "schwarzian_pointwise",
    "verify_cocycle",
    "pullback",
    "orbifold_pushdown",
    "orbifold_lift",
    "ramified_lift",
]


@dataclass(frozen=True)
class QuadraticDifferential:
    """``xi(z) dz**2`` in a named chart."""

    chart_label: str
    xi: LaurentSeries

    def pullback(self, w: LaurentSeries, chart_label: str | None = None):
        return pullback(self, w, chart_label)


def schwarzian_from_derivative(fprime: LaurentSeries, exponent=0.0) -> LaurentSeries:
    """Schwarzian of ``f`` given ``f' = (z - center)**exponent * fprime``.

    The extra (possibly fractional or complex) exponent lets power maps such as
    ``z**theta`` and log-type maps be handled: only ``f''/f'`` enters, and it
    equals ``exponent / (z - center) + fprime'/fprime``.
    """
    if fprime.is_zero:
        raise DegenerateInputError("f' vanishes identically; the Schwarzian is undefined")
    q = fprime.derivative() / fprime
    if exponent:
        q = q + LaurentSeries.monomial(-1, exponent, fprime.center)
    return q.derivative() - 0.5 * q * q


def schwarzian(f: LaurentSeries) -> LaurentSeries:
    """``(f''/f')' - (f''/f')**2 / 2`` in the chart of ``f``.

    Negative valuations are allowed: a developing map with a simple pole is
    handled like any other series.

    >>> z = LaurentSeries.monomial(1)
    >>> schwarzian(1 / z + 0 * z).residual(LaurentSeries.zero()) < 1e-14
    True
    """
    fp = f.derivative()
    if fp.is_zero:
        raise DegenerateInputError("f is locally constant; the Schwarzian is undefined")
    return schwarzian_from_derivative(fp)


def schwarzian_pointwise(d1, d2, d3):
    """Schwarzian from values of ``f', f'', f'''``."""
    d1, d2, d3 = (np.asarray(x, dtype=complex) for x in (d1, d2, d3))
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def _relative_residual(lhs: LaurentSeries, rhs: LaurentSeries) -> float:
    scale = max(1.0, float(np.max(np.abs(rhs.coeffs))) if not rhs.is_zero else 1.0)
    return lhs.residual(rhs) / scale


def verify_cocycle(f: LaurentSeries, gamma: MobiusMap, side: str = "pre") -> float:
    """Residual of one of the two Möbius invariance identities.

    ``side="pre"``:  ``S(f o gamma) - (S(f) o gamma) * gamma'**2``, expanded at
    the point ``gamma**-1(f.center)``.
    ``side="post"``: ``S(gamma o f) - S(f)``.

    The value is the max coefficient modulus of the difference, divided by
    ``max(1, max |coefficient|)`` of the right-hand side.
    """
    if side == "pre":
        z0 = gamma.inverse()(f.center)
        if not np.isfinite(z0):
            raise InputError("gamma sends infinity to the expansion point of f")
        order = None if f.is_exact else f.truncation + 2
        g = gamma.as_series(z0, order=order)
        lhs = schwarzian(f.compose(g))
        dg = g.derivative()
        rhs = schwarzian(f).compose(g) * dg * dg
        return _relative_residual(lhs, rhs)
    if side == "post":
        num = gamma.a * f + gamma.b
        den = gamma.c * f + gamma.d
        if abs(den.coefficient(0)) < 1e-12 and den.valuation <= 0:
            raise InputError("gamma o f has a pole at the expansion point")
        lhs = schwarzian(num / den)
        rhs = schwarzian(f)
        return _relative_residual(lhs, rhs)
    raise InputError(f"side must be 'pre' or 'post', got {side!r}")


def pullback(q: QuadraticDifferential, w: LaurentSeries, chart_label: str | None = None):
    """``(xi o w) * w'**2``: the quadratic-differential transformation law."""
    dw = w.derivative()
    if dw.is_zero:
        raise DegenerateInputError("w' vanishes identically")
    xi_new = q.xi.compose(w) * dw * dw
    return QuadraticDifferential(chart_label or f"{q.chart_label}*", xi_new)


def orbifold_pushdown(xi_k: LaurentSeries, k: int) -> LaurentSeries:
    """``k**2 y**(2k-2) xi_k(y**k)`` by exponent bookkeeping.

    A coefficient of ``z**n`` moves to ``y**(k n + 2k - 2)``; nothing else
    changes apart from the factor ``k**2``.
    """
    if k < 2:
        raise InputError("orbifold order k must be at least 2")
    if xi_k.valuation < 0 and not xi_k.is_zero:
        raise InputError("orbifold pushdown expects a series holomorphic at 0")
    shift = 2 * k - 2
    if xi_k.is_exact:
        order = None
    else:
        order = k * (xi_k.order + 1) + shift - 1
    if xi_k.is_zero:
        return LaurentSeries.zero(xi_k.center, order)
    c = np.zeros(k * (len(xi_k.coeffs) - 1) + 1, complex)
    c[::k] = xi_k.coeffs * (k * k)
    return LaurentSeries(c, k * xi_k.valuation + shift, xi_k.center, order)


def orbifold_lift(xi_orb: LaurentSeries, k: int) -> LaurentSeries:
    """Inverse of :func:`orbifold_pushdown`; raises :class:`StructureError`
    naming the first exponent that does not fit the lattice ``2k-2 + k n``."""
    if k < 2:
        raise InputError("orbifold order k must be at least 2")
    shift = 2 * k - 2
    if xi_orb.is_zero:
        if xi_orb.is_exact:
            return LaurentSeries.zero(xi_orb.center)
        return LaurentSeries.zero(xi_orb.center, (xi_orb.order - shift) // k)
    scale = np.max(np.abs(xi_orb.coeffs))
    for p, a in zip(xi_orb.powers, xi_orb.coeffs):
        if abs(a) < ZERO_THRESHOLD * scale:
            continue
        if p < shift or (p - shift) % k:
            raise StructureError(
                f"exponent {p} is not of the form {shift} + {k} n with n >= 0", exponent=int(p))
    v = (xi_orb.valuation - shift) // k
    c = xi_orb.coeffs[(shift + k * v - xi_orb.valuation)::k] / (k * k)
    if xi_orb.is_exact:
        order = None
    else:
        order = (xi_orb.order - shift) // k
    return LaurentSeries(c, v, xi_orb.center, order)


def ramified_lift(xi: LaurentSeries, k: int) -> LaurentSeries:
    """Schwarzian differential of the structure pulled back by ``z = y**k``.

    Unlike :func:`pullback`, this includes the Schwarzian of the covering map
    itself, ``S_y(y**k) = (1 - k**2) / (2 y**2)``, so it measures the lifted
    structure against the ``y`` chart.  An elliptic puncture of order ``k``
    lifts to a series of nonnegative valuation.
    """
    if k < 1:
        raise InputError("covering degree must be positive")
    w = LaurentSeries.monomial(k, center=xi.center)
    if xi.center != 0:
        raise InputError("ramified lift is taken about the puncture at 0")
    q = pullback(QuadraticDifferential("z", xi), w, "y").xi
    return q + LaurentSeries.monomial(-2, (1 - k * k) / 2.0)
