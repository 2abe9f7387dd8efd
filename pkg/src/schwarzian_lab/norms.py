"""Hyperbolic sup norm and Euclidean area norm of Schwarzian differentials."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InputError, NumericalFailure
from .series import LaurentSeries

__all__ = [
    "CoveringChart",
    "NormReport",
    "AreaNorm",
    "relative_xi",
    "hyperbolic_density",
    "surface_density",
    "hyperbolic_sup_norm",
    "euclidean_area_norm",
    "schlicht_thresholds",
    "norm_report",
]

CUSP_XI = LaurentSeries.monomial(-2, 0.5)
_SURFACES = {"disc": "disc", "punctured_disc": "punctured_disc",
             "punctured-disc": "punctured_disc"}
# deepest cusp layer: |z| = exp(-256) keeps |z|**2 and 1/|z|**2 inside double range
_CUSP_LAYERS = 8
_DISC_LAYERS = 24
_OUTER_LAYERS = 6
_GROWTH_FACTOR = 10.0
_RATIO = 0.9


def _surface(name: str) -> str:
    try:
        return _SURFACES[name]
    except KeyError:
        raise InputError(f"unknown surface {name!r}; use 'disc' or 'punctured_disc'") from None


class CoveringChart:
    """Universal covering of the surface by the unit disc.

    ``disc``: the identity.  ``punctured_disc``: ``pi(w) = exp((w+1)/(w-1))``,
    whose inverse on a fundamental domain is ``w = (s+1)/(s-1)`` with
    ``s = ln z``.
    """

    def __init__(self, surface: str = "disc"):
        self.surface = _surface(surface)

    def pi(self, w):
        w = np.asarray(w, dtype=complex)
        if self.surface == "disc":
            return w
        return np.exp((w + 1) / (w - 1))

    def dpi(self, w):
        w = np.asarray(w, dtype=complex)
        if self.surface == "disc":
            return np.ones_like(w)
        return self.pi(w) * (-2.0 / (w - 1) ** 2)

    def layer(self, j: int, n_rad: int, n_ang: int, outer: bool = False) -> np.ndarray:
        """Sample points ``w`` of refinement layer ``j``.

        Disc: ``1 - 2**-j <= |w| <= 1 - 2**-(j+1)`` (layer 0 includes ``w = 0``).
        Punctured disc: ``-2**(j+1) <= ln|z| <= -2**j`` towards the cusp, or
        ``-2**-j <= ln|z| <= -2**-(j+1)`` towards the outer circle when
        ``outer``; each layer is mapped to ``w`` through the fundamental domain.
        """
        u = np.linspace(0.0, 1.0, n_rad)
        tau = 2 * np.pi * np.arange(n_ang) / n_ang
        if self.surface == "disc":
            a = 0.0 if j == 0 else 1 - 2.0 ** -j
            b = 1 - 2.0 ** -(j + 1)
            rad = a + (b - a) * u
            return (rad[:, None] * np.exp(1j * tau[None, :])).ravel()
        if outer:
            sig = -(2.0 ** -j) * 2.0 ** (-u)
        else:
            sig = -(2.0 ** j) * 2.0 ** u
        tau = tau - np.pi
        s = sig[:, None] + 1j * tau[None, :]
        return ((s + 1) / (s - 1)).ravel()


def relative_xi(xi, surface: str = "disc"):
    """``xi`` against the base structure of the surface: the identity chart
    for the disc, the cusp (``S_z(ln z) = 1/(2 z**2)``) for the punctured disc."""
    surface = _surface(surface)
    if surface == "disc":
        return xi
    if isinstance(xi, LaurentSeries):
        return xi - CUSP_XI
    if callable(xi):
        return lambda z: xi(z) - 0.5 / np.asarray(z, dtype=complex) ** 2
    raise InputError("xi must be a Laurent series or a callable")


def _evaluable(xi):
    if isinstance(xi, LaurentSeries):
        return xi
    if np.isscalar(xi):
        a = complex(xi)
        return lambda z: np.full(np.shape(z), a, dtype=complex)
    if callable(xi):
        return xi
    raise InputError("xi must be a Laurent series, a scalar or a callable")


def hyperbolic_density(xi, chart: CoveringChart, w):
    """``|xi~(w)| (1 - |w|**2)**2 / 4`` with ``xi~ = (xi o pi) pi'**2``."""
    f = _evaluable(xi)
    w = np.asarray(w, dtype=complex)
    with np.errstate(all="ignore"):
        z = chart.pi(w)
        dens = 0.25 * np.abs(f(z)) * np.abs(chart.dpi(w)) ** 2 * (1 - np.abs(w) ** 2) ** 2
    return dens


def surface_density(xi, surface: str, z):
    """The sup-norm density pushed down to the surface coordinate ``z``:
    ``|xi| (1 - |z|**2)**2 / 4`` on the disc, ``|xi| |z|**2 ln**2 |z|`` on the
    punctured disc.  ``nan`` outside the surface."""
    surface = _surface(surface)
    f = _evaluable(xi)
    z = np.asarray(z, dtype=complex)
    a = np.abs(z)
    inside = (a < 1) & ((a > 0) | (surface == "disc"))
    zz = np.where(inside, z, 0.5)
    with np.errstate(all="ignore"):
        v = np.abs(np.asarray(f(zz), dtype=complex))
        if surface == "disc":
            d = 0.25 * v * (1 - a ** 2) ** 2
        else:
            d = v * np.abs(zz) ** 2 * np.log(np.abs(zz)) ** 2
    return np.where(inside, d, np.nan)


def _layer_max(xi, chart, w):
    d = hyperbolic_density(xi, chart, w)
    if np.any(np.isnan(d)):
        i = int(np.argmax(np.isnan(d)))
        raise NumericalFailure("xi could not be evaluated on the covering grid",
                               location=complex(chart.pi(w[i])))
    i = int(np.argmax(d))
    return float(d[i]), complex(w[i])


def _refine(xi, chart, w0, d0):
    """Local Nelder-Mead polish of the density maximum near ``w0``."""
    def neg(p):
        w = complex(p[0], p[1])
        if abs(w) >= 1:
            return 0.0
        v = float(hyperbolic_density(xi, chart, np.array([w]))[0])
        return -v if np.isfinite(v) else 0.0

    h = 0.05 * (1 - abs(w0)) + 1e-12
    simplex = np.array([[w0.real, w0.imag], [w0.real + h, w0.imag], [w0.real, w0.imag + h]])
    res = minimize(neg, [w0.real, w0.imag], method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-14,
                            "maxiter": 400})
    return max(d0, -float(res.fun))


@dataclass
class SupNorm:
    value: float
    infinite: bool
    rel_error: float
    layer_maxima: list = field(default_factory=list)
    argmax: complex | None = None


def hyperbolic_sup_norm(xi, chart: CoveringChart | str = "disc", n_ang: int = 256,
                        n_rad: int = 32, layers: int | None = None) -> SupNorm:
    """``1/4 sup |xi~|(1 - |w|**2)**2`` over layered radial-angular grids.

    The value is flagged infinite when the layer maxima towards the boundary
    (or the cusp) grow more than tenfold across the last three refinements.
    """
    chart = chart if isinstance(chart, CoveringChart) else CoveringChart(chart)
    if chart.surface == "disc":
        J = _DISC_LAYERS if layers is None else layers
        inner = [chart.layer(j, n_rad, n_ang) for j in range(J)]
        outer = []
    else:
        J = _CUSP_LAYERS if layers is None else layers
        inner = [chart.layer(j, n_rad, n_ang) for j in range(J)]
        outer = [chart.layer(j, n_rad, n_ang, outer=True) for j in range(_OUTER_LAYERS)]
    maxima = [_layer_max(xi, chart, w) for w in inner]
    omax = [_layer_max(xi, chart, w) for w in outer]
    vals = np.array([m for m, _ in maxima])
    infinite = False
    if len(vals) >= 4 and np.all(np.diff(vals[-4:]) > 0) and vals[-1] > _GROWTH_FACTOR * vals[-4]:
        infinite = True
    if chart.surface == "disc" or not outer:
        ovals = np.array([])
    else:
        ovals = np.array([m for m, _ in omax])
        if len(ovals) >= 4 and np.all(np.diff(ovals[-4:]) > 0) and \
                ovals[-1] > _GROWTH_FACTOR * ovals[-4]:
            infinite = True
    allm = maxima + omax
    best, wbest = max(allm, key=lambda t: t[0])
    if infinite:
        return SupNorm(math.inf, True, 0.0, [float(v) for v in vals], None)
    refined = _refine(xi, chart, wbest, best)
    rel = (refined - best) / refined if refined > 0 else 0.0
    return SupNorm(refined, False, float(rel), [float(v) for v in vals],
                   complex(chart.pi(wbest)))


@dataclass
class AreaNorm:
    """``int |xi| dA`` over ``eps < |z| < 1`` and its behaviour as ``eps -> 0``."""

    value_at_eps: float
    eps: float
    convergent: bool
    limit: float
    growth: str
    growth_rate: float
    increments: list = field(default_factory=list)
    rel_error: float = 0.0


def _annulus_integral(f, a: float, b: float, n_ang: int, n_gauss: int) -> float:
    """``int_{a<|z|<b} |f| dA`` with Gauss-Legendre in ``ln r`` and the
    trapezoid rule in the angle."""
    x, wts = np.polynomial.legendre.leggauss(n_gauss)
    la, lb = math.log(a), math.log(b)
    u = 0.5 * (lb - la) * x + 0.5 * (lb + la)
    r = np.exp(u)
    th = 2 * np.pi * np.arange(n_ang) / n_ang
    z = r[:, None] * np.exp(1j * th[None, :])
    with np.errstate(all="ignore"):
        vals = np.abs(np.asarray(f(z), dtype=complex))
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("xi is not finite on the quadrature annulus",
                               location=complex(z.ravel()[np.argmax(~np.isfinite(vals.ravel()))]))
    ang = vals.mean(axis=1) * 2 * np.pi
    return float(0.5 * (lb - la) * np.sum(wts * ang * r * r))


def euclidean_area_norm(xi, eps: float = 1e-3, levels: int = 10, n_ang: int = 256,
                        n_gauss: int = 24) -> AreaNorm:
    """Area integral of ``|xi|`` and a convergence verdict.

    The annulus ``eps < |z| < 1`` is integrated octave by octave; then the
    increments over ``eps 2**-(j+1) < |z| < eps 2**-j`` are examined.  Ratios
    of successive increments at most 0.9 mean convergence (a geometric tail is
    added for the limit); ratios near 1 mean logarithmic growth, larger ones
    power growth with exponent ``log2(ratio)``.
    """
    f = _evaluable(xi)
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    edges = [1.0]
    while edges[-1] / 2 > eps:
        edges.append(edges[-1] / 2)
    edges.append(eps)
    total = sum(_annulus_integral(f, b, a, n_ang, n_gauss) for a, b in zip(edges[:-1], edges[1:]))
    inc = []
    e = eps
    for _ in range(levels):
        inc.append(_annulus_integral(f, e / 2, e, n_ang, n_gauss))
        e /= 2
    inc = np.array(inc)
    with np.errstate(all="ignore"):
        ratios = inc[1:] / inc[:-1]
    tail = ratios[-3:]
    if np.all(inc == 0):
        return AreaNorm(total, eps, True, total, "convergent", 0.0, inc.tolist(), 0.0)
    if np.all(tail <= _RATIO):
        q = float(tail[-1])
        limit = total + float(inc.sum()) + float(inc[-1]) * q / (1 - q)
        rel = float(inc[-1]) * q / (1 - q) / limit if limit else 0.0
        return AreaNorm(total, eps, True, limit, "convergent", q, inc.tolist(), rel)
    q = float(np.mean(tail))
    if q <= 1.0 / _RATIO:
        # constant increments per halving: A ln(1/eps) with A = increment / ln 2
        return AreaNorm(total, eps, False, math.inf, "logarithmic",
                        float(inc[-1]) / math.log(2), inc.tolist())
    return AreaNorm(total, eps, False, math.inf, "power", math.log2(q), inc.tolist())


def schlicht_thresholds(l_inf: float) -> dict:
    """Nehari (``<= 1/2``, univalence) and Kraus (``> 3/2``, not univalent) tests
    for a developing map of the disc."""
    if not np.isfinite(l_inf):
        raise InputError("thresholds need a finite sup norm")
    return {"nehari_pass": bool(l_inf <= 0.5), "kraus_violated": bool(l_inf > 1.5)}


@dataclass
class NormReport:
    surface: str
    relative: bool
    normed: str
    l_inf: float
    l_inf_infinite: bool
    l_inf_rel_error: float
    l_one: float
    l_one_infinite: bool
    l_one_growth: str
    l_one_growth_rate: float
    l_one_at_eps: float
    eps: float
    thresholds: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def num(x):
            return "inf" if not np.isfinite(x) else float(x)

        return {
            "surface": self.surface,
            "relative": self.relative,
            "normed": self.normed,
            "l_inf": num(self.l_inf),
            "l_inf_infinite": self.l_inf_infinite,
            "l_inf_rel_error": float(self.l_inf_rel_error),
            "l_one": num(self.l_one),
            "l_one_infinite": self.l_one_infinite,
            "l_one_growth": self.l_one_growth,
            "l_one_growth_rate": float(self.l_one_growth_rate),
            "l_one_at_eps": float(self.l_one_at_eps),
            "eps": self.eps,
            "thresholds": self.thresholds,
            "diagnostics": self.diagnostics,
        }


def norm_report(xi, surface: str = "disc", relative: bool = False, eps: float = 1e-3,
                n_ang: int = 256) -> NormReport:
    """Both norms of ``xi`` (or of ``xi`` minus the cusp when ``relative`` on
    the punctured disc), with a record of which differential was normed."""
    surface = _surface(surface)
    target = relative_xi(xi, surface) if relative else xi
    normed = "xi"
    if relative and surface == "punctured_disc":
        normed = "xi - 1/(2 z^2)"
    sup = hyperbolic_sup_norm(target, CoveringChart(surface), n_ang=n_ang)
    area = euclidean_area_norm(target, eps, n_ang=n_ang)
    thresholds = None
    if surface == "disc" and not sup.infinite:
        thresholds = schlicht_thresholds(sup.value)
    diag = {"sup_layer_maxima": sup.layer_maxima, "area_increments": area.increments}
    return NormReport(surface, relative, normed, sup.value, sup.infinite, sup.rel_error,
                      area.limit, not area.convergent, area.growth, area.growth_rate,
                      area.value_at_eps, eps, thresholds, diag)
