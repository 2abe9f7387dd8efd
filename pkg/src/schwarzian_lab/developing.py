"""Developing maps valued in the Riemann sphere.

Every map here can be evaluated on a slit disc (a single branch) and along a
circle with continuous continuation.  Multivalued closed forms are written as
functions of ``(z, log z)`` so that the branch is carried by the logarithm
alone.
"""
from __future__ import annotations

import numpy as np

from .mobius import INF, MobiusMap
from .series import LaurentSeries

__all__ = [
    "DevelopingMap",
    "FunctionMap",
    "LogDevelopingMap",
    "PowerDevelopingMap",
    "branch_interval",
    "branch_log",
]

TWO_PI = 2.0 * np.pi


def branch_interval(theta: float) -> float:
    """Lower end ``lo`` of the argument interval ``(lo, lo + 2 pi)`` for the
    slit ray at angle ``theta``; ``lo`` is congruent to ``theta`` and lies in
    ``[-pi, pi)``."""
    t = float(np.mod(theta, TWO_PI))
    return t - TWO_PI if t >= np.pi else t


def branch_arg(z, theta: float):
    lo = branch_interval(theta)
    return lo + np.mod(np.angle(z) - lo, TWO_PI)


def branch_log(z, theta: float):
    """Logarithm on the disc slit along the ray at angle ``theta``."""
    z = np.asarray(z, dtype=complex)
    return np.log(np.abs(z)) + 1j * branch_arg(z, theta)


def _as_function(h):
    if isinstance(h, LaurentSeries):
        dh = h.derivative()
        return h, dh
    if np.isscalar(h):
        const = complex(h)
        return (lambda z: np.full_like(np.asarray(z, dtype=complex), const)), \
            (lambda z: np.zeros_like(np.asarray(z, dtype=complex)))
    return h, None


def _numeric_derivative(f, z, logz):
    h = 1e-6 * np.maximum(np.abs(z), 1e-300)
    # shift the log consistently so the branch does not jump
    fp = f(z + h, logz + np.log1p(h / z))
    fm = f(z - h, logz + np.log1p(-h / z))
    return (fp - fm) / (2 * h)


class DevelopingMap:
    """Base class.  Subclasses implement ``_value(z, logz)`` and optionally
    ``_deriv(z, logz)``."""

    theta = 1.5 * np.pi
    label = "developing map"

    def _value(self, z, logz):
        raise NotImplementedError

    def _deriv(self, z, logz):
        return _numeric_derivative(self._value, z, logz)

    def evaluate(self, z, theta=None):
        """Values on the slit disc ``D \\ l^theta`` (``inf`` marks the point at infinity)."""
        theta = self.theta if theta is None else theta
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            out = self._value(z, branch_log(z, theta))
        return out

    def __call__(self, z, theta=None):
        return self.evaluate(z, theta)

    def derivative(self, z, theta=None):
        theta = self.theta if theta is None else theta
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            return self._deriv(z, branch_log(z, theta))

    def on_circle(self, r: float, n: int, start_angle: float = 0.0, turns: int = 1):
        """Continuous continuation around ``|z| = r``.

        Returns ``(angles, values)`` with ``n * turns + 1`` equispaced samples
        from ``start_angle`` to ``start_angle + 2 pi turns``.
        """
        angles = start_angle + TWO_PI * np.arange(n * turns + 1) / n
        z = r * np.exp(1j * angles)
        logz = np.log(r) + 1j * angles
        with np.errstate(all="ignore"):
            return angles, self._value(z, logz)

    def post_compose(self, m: MobiusMap) -> "DevelopingMap":
        return PostComposed(self, m)


class FunctionMap(DevelopingMap):
    """A single-valued map ``z -> f(z)``."""

    def __init__(self, f, df=None, label="f"):
        self.f, self.df = _as_function(f)
        if df is not None:
            self.df = df
        self.label = label

    def _value(self, z, logz):
        return self.f(z)

    def _deriv(self, z, logz):
        if self.df is None:
            return _numeric_derivative(self._value, z, logz)
        return self.df(z)


class LogDevelopingMap(DevelopingMap):
    """``g(z) + (c / 2 pi i) ln(z / z0)`` with ``g`` single-valued near 0.

    Continuing once around the origin in the positive sense adds ``c``.
    """

    def __init__(self, g, c, z0=1.0, label=None):
        self.g_input = g
        self.g, self.dg = _as_function(g)
        self.c = complex(c)
        self.z0 = complex(z0)
        self.kappa = self.c / (2j * np.pi)
        self.label = label or "g + (c/2 pi i) ln(z/z0)"

    def _value(self, z, logz):
        return self.g(z) + self.kappa * (logz - np.log(self.z0))

    def _deriv(self, z, logz):
        if self.dg is None:
            return _numeric_derivative(self._value, z, logz)
        return self.dg(z) + self.kappa / z


class PowerDevelopingMap(DevelopingMap):
    """``H(z) * z**alpha`` on a slit disc."""

    def __init__(self, H, alpha, dH=None, label=None):
        self.H, self.dH = _as_function(H)
        if dH is not None:
            self.dH = dH
        self.alpha = complex(alpha)
        self.label = label or "H(z) z**alpha"

    def _value(self, z, logz):
        hv = np.asarray(self.H(z), dtype=complex)
        p = np.exp(self.alpha * logz)
        # an overflowing H stands for the point at infinity, not for nan
        return np.where(np.isfinite(hv) | (p == 0), hv * p, INF)

    def _deriv(self, z, logz):
        if self.dH is None:
            return _numeric_derivative(self._value, z, logz)
        p = np.exp(self.alpha * logz)
        return self.dH(z) * p + self.alpha * self.H(z) * p / z


class PostComposed(DevelopingMap):
    """``m o inner``; another developing map of the same structure."""

    def __init__(self, inner: DevelopingMap, m: MobiusMap):
        self.inner, self.m = inner, m
        self.theta = inner.theta
        self.label = f"mobius o {inner.label}"

    def _value(self, z, logz):
        return self.m(self.inner._value(z, logz))

    def _deriv(self, z, logz):
        w = self.inner._value(z, logz)
        return self.m.derivative(w) * self.inner._deriv(z, logz)

    def evaluate(self, z, theta=None):
        return self.m(self.inner.evaluate(z, theta))

    def derivative(self, z, theta=None):
        w = self.inner.evaluate(z, theta)
        return self.m.derivative(w) * self.inner.derivative(z, theta)

    def on_circle(self, r, n, start_angle=0.0, turns=1):
        angles, w = self.inner.on_circle(r, n, start_angle, turns)
        return angles, self.m(w)


def sphere_point(w):
    """Unit-sphere image of ``w`` under inverse stereographic projection;
    ``inf`` goes to the north pole."""
    w = np.asarray(w, dtype=complex)
    inf = ~np.isfinite(w)
    ww = np.where(inf, 0.0, w)
    big = np.abs(ww) > 1.0
    with np.errstate(all="ignore"):
        # for |w| > 1 use u = 1/w to keep precision near the north pole
        u = np.where(big, 1.0 / np.where(big, ww, 1.0), ww)
    d = 1.0 + np.abs(u) ** 2
    x = 2 * u.real / d
    y = 2 * u.imag / d
    zc = (np.abs(u) ** 2 - 1.0) / d
    # 1/w = conj(w)/|w|^2 reflects the latitude and the imaginary direction
    y = np.where(big, -y, y)
    zc = np.where(big, -zc, zc)
    pts = np.stack([x, y, zc], axis=-1)
    pts[inf] = (0.0, 0.0, 1.0)
    return pts


def spherical_distance(w1, w2):
    """Great-circle distance on the unit sphere (diameter ``pi``)."""
    p, q = sphere_point(w1), sphere_point(w2)
    chord = np.linalg.norm(p - q, axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def from_sphere(p):
    """Inverse of :func:`sphere_point` for a single point."""
    x, y, zc = (float(v) for v in p)
    if zc <= 0:
        return complex(x, y) / (1.0 - zc)
    # upper hemisphere: (x + iy)/(1 - z) = (1 + z)/(x - iy) avoids the cancellation
    den = complex(x, -y)
    return (1.0 + zc) / den if den != 0 else INF
