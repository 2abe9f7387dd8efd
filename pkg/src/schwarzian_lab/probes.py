"""Sampling probes for injectivity and for the behaviour of a developing map
at the puncture.

Verdicts are evidence at a stated resolution: ``pass`` means no collision was
found on the grid used, not that the map is injective.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial import QhullError

from .config import DEFAULTS, Tolerances
from .developing import (TWO_PI, DevelopingMap, LogDevelopingMap, PowerDevelopingMap,
                         branch_arg, branch_interval, from_sphere, sphere_point,
                         spherical_distance)
from .errors import InputError, NumericalFailure
from .mobius import INF
from .series import LaurentSeries, complex_to_json

__all__ = [
    "SlitDisc",
    "AnnulusSector",
    "ProbeVerdict",
    "probe_injectivity",
    "koebe_witness",
    "accumulation_probe",
    "power_form_probe",
    "spherical_diameter",
    "write_samples_csv",
]

COLLISION_IMAGE_TOL = 1e-10
COLLISION_DOMAIN_TOL = 1e-3
_NEIGHBOURS = 16
_MIN_INDEX_GAP = 12
_MAX_POLISH = 64
_CANDIDATE_FACTOR = 10.0


@dataclass(frozen=True)
class SlitDisc:
    """``r_inner < |z| < r_outer`` with the ray at angle ``theta`` removed."""

    theta: float = 1.5 * np.pi
    r_inner: float = 0.05
    r_outer: float = 0.95

    def __post_init__(self):
        if not 0 < self.r_inner < self.r_outer <= 1:
            raise InputError("need 0 < r_inner < r_outer <= 1")

    def grid(self, n: int):
        """``n x n`` log-polar grid of cell midpoints; returns ``(radii, angles)``."""
        u = (np.arange(n) + 0.5) / n
        radii = self.r_inner * (self.r_outer / self.r_inner) ** u
        angles = branch_interval(self.theta) + TWO_PI * u
        return radii, angles

    def contains(self, z) -> bool:
        a = abs(z)
        if not self.r_inner < a < self.r_outer:
            return False
        lo = branch_interval(self.theta)
        arg = float(branch_arg(z, self.theta))
        return lo < arg < lo + TWO_PI


@dataclass(frozen=True)
class AnnulusSector:
    """``{rho e^{i a} : r < rho < R, theta + t < a < theta + 2 pi - t}``."""

    r: float = 1.0 / 64
    R: float = 1.0 / 32
    theta: float = 0.0
    t: float = 0.1

    def __post_init__(self):
        if not 0 < self.r < self.R < 1:
            raise InputError("need 0 < r < R < 1")
        if not 0 < self.t < np.pi:
            raise InputError("need 0 < t < pi")

    @property
    def ratio(self) -> float:
        return self.r / self.R

    def grid(self, n: int) -> np.ndarray:
        """Points of an ``n x m`` grid, ``m`` odd so the midline ``theta + pi``
        is sampled; angles are symmetric about it."""
        m = n if n % 2 else n + 1
        u = (np.arange(n) + 0.5) / n
        radii = self.r * (self.R / self.r) ** u
        half = np.pi - self.t
        angles = self.theta + np.pi + np.linspace(-half, half, m + 2)[1:-1]
        return (radii[:, None] * np.exp(1j * angles[None, :])).ravel()


@dataclass
class ProbeVerdict:
    outcome: str
    z1: complex | None = None
    z2: complex | None = None
    image_distance: float | None = None
    point: complex | None = None
    spread: float | None = None
    samples_used: int = 0
    resolution: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def is_collision(self) -> bool:
        return self.outcome == "collision"

    def to_json(self) -> dict:
        def cj(z):
            if z is None:
                return None
            return "inf" if not np.isfinite(z) else complex_to_json(z)

        out = {
            "outcome": self.outcome,
            "samples_used": int(self.samples_used),
            "resolution": self.resolution,
            "details": self.details,
        }
        if self.outcome == "collision":
            out.update(z1=cj(self.z1), z2=cj(self.z2), image_distance=self.image_distance)
        if self.point is not None:
            out["point"] = cj(self.point)
            out["sphere_point"] = [float(x) for x in sphere_point(self.point)]
        if self.spread is not None:
            out["spread"] = self.spread
        return out


def spherical_diameter(points) -> float:
    """Spherical diameter of a finite set of sphere points (rows of ``points``)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    try:
        idx = ConvexHull(pts, qhull_options="QJ").vertices
        cand = pts[idx]
    except (QhullError, ValueError):
        cand = pts
    if len(cand) > 4000:
        cand = cand[np.random.default_rng(0).choice(len(cand), 4000, replace=False)]
    best = 0.0
    for i in range(0, len(cand), 512):
        d = np.linalg.norm(cand[i:i + 512, None, :] - cand[None, :, :], axis=-1)
        best = max(best, float(d.max()))
    return float(2.0 * np.arcsin(min(1.0, best / 2.0)))


def _evaluate_grid(dev: DevelopingMap, radii, angles, theta):
    if hasattr(dev, "evaluate_polar"):
        w = dev.evaluate_polar(radii, angles, theta)
    else:
        z = radii[:, None] * np.exp(1j * angles[None, :])
        w = dev.evaluate(z, theta)
    w = np.asarray(w, dtype=complex)
    bad = np.isnan(w.real) | np.isnan(w.imag)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NumericalFailure("developing map evaluation failed inside the domain",
                               location=radii[i] * np.exp(1j * angles[j]))
    return w


def _newton_match(dev: DevelopingMap, target, z, theta, domain=None, iters=40):
    """Solve ``dev(w) = target`` from ``w = z``; the ``1/dev`` chart is used
    near infinity.  Returns ``None`` when the iteration leaves the domain."""
    inverted = (not np.isfinite(target)) or abs(target) > 1.0
    tgt = 0j if not np.isfinite(target) else (1.0 / target if inverted else target)
    w = complex(z)
    for _ in range(iters):
        v = complex(dev.evaluate(w, theta))
        d = complex(dev.derivative(w, theta))
        if inverted:
            if not np.isfinite(v):
                return w
            F, dF = 1.0 / v - tgt, -d / v ** 2
        else:
            F, dF = v - tgt, d
        if not np.isfinite(F):
            return None
        if abs(F) <= 1e-15 * max(1.0, abs(tgt)):
            return w
        if dF == 0 or not np.isfinite(dF):
            return None
        step = F / dF
        # damp steps that would move more than half the distance to the puncture
        lim = 0.5 * abs(w)
        if abs(step) > lim:
            step *= lim / abs(step)
        w = w - step
        if domain is not None and not domain.contains(w):
            return None
    return w


def _verified(dev, z1, z2, theta):
    if z2 is None:
        return None
    d = float(spherical_distance(dev.evaluate(z1, theta), dev.evaluate(z2, theta)))
    sep = abs(z1 - z2)
    if d < COLLISION_IMAGE_TOL and sep > COLLISION_DOMAIN_TOL * max(abs(z1), abs(z2)):
        return d
    return None


def probe_injectivity(dev: DevelopingMap, domain: SlitDisc = SlitDisc(), grid_n: int = 128,
                      max_polish: int = _MAX_POLISH) -> ProbeVerdict:
    """Look for ``z1 != z2`` in ``domain`` with ``dev(z1) = dev(z2)``.

    Image points on the sphere are paired with their nearest neighbours
    (k-d tree); pairs far apart on the grid but close in the image, relative
    to the local image spacing, are polished by Newton's method.
    """
    theta = domain.theta
    radii, angles = domain.grid(grid_n)
    w = _evaluate_grid(dev, radii, angles, theta)
    P = sphere_point(w)
    n = grid_n
    # local image spacing: distance to the next grid point in each direction
    s = np.zeros((n, n))
    dr = np.linalg.norm(np.diff(P, axis=0), axis=-1)
    da = np.linalg.norm(np.diff(P, axis=1), axis=-1)
    s[:-1] = np.maximum(s[:-1], dr)
    s[1:] = np.maximum(s[1:], dr)
    s[:, :-1] = np.maximum(s[:, :-1], da)
    s[:, 1:] = np.maximum(s[:, 1:], da)
    flat = P.reshape(-1, 3)
    sflat = s.ravel()
    tree = cKDTree(flat)
    k = min(_NEIGHBOURS + 1, len(flat))
    dist, nbr = tree.query(flat, k=k)
    ii = np.repeat(np.arange(len(flat)), k)
    jj = nbr.ravel()
    dd = dist.ravel()
    keep = ii < jj
    ii, jj, dd = ii[keep], jj[keep], dd[keep]
    ri, ai = np.divmod(ii, n)
    rj, aj = np.divmod(jj, n)
    far = np.maximum(np.abs(ri - rj), np.abs(ai - aj)) > _MIN_INDEX_GAP
    scale = np.maximum(sflat[ii], sflat[jj])
    cand = far & (dd < _CANDIDATE_FACTOR * scale)
    ii, jj, dd, scale = ii[cand], jj[cand], dd[cand], scale[cand]
    order = np.argsort(dd / np.maximum(scale, 1e-300), kind="stable")
    zgrid = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    tried = 0
    for idx in order[:max_polish]:
        tried += 1
        z1, z2 = complex(zgrid[ii[idx]]), complex(zgrid[jj[idx]])
        target = complex(w.ravel()[ii[idx]])
        z2p = _newton_match(dev, target, z2, theta, domain)
        d = _verified(dev, z1, z2p, theta)
        if d is not None:
            return ProbeVerdict("collision", z1, z2p, d, samples_used=n * n,
                                resolution={"grid_n": n, "candidates": int(len(ii))},
                                details={"polished": tried})
    return ProbeVerdict("pass", samples_used=n * n,
                        resolution={"grid_n": n, "candidates": int(len(ii)),
                                    "note": "no collision at this resolution"},
                        details={"polished": tried})


def _root_of_unity(k: int) -> complex:
    """``k``-th root of unity with the smallest real part (smallest angle on ties)."""
    j = np.arange(1, k)
    roots = np.exp(2j * np.pi * j / k)
    re = np.round(roots.real, 12)
    return complex(roots[np.nonzero(re == re.min())[0][0]])


def koebe_witness(g, c=0.0, epsilon_range=(1e-1, 1e-2, 1e-3, 1e-4), z0=1.0,
                  theta: float = 1.5 * np.pi) -> ProbeVerdict:
    """Collision witness for ``phi = g + (c / 2 pi i) ln(z / z0)`` when ``g``
    has a pole of order at least 2.

    For each ``eps``: balls of radius ``eps/2`` about ``eps`` and ``lambda eps``
    (``lambda`` a root of unity of order ``|k0|``); the quarter theorem gives
    image discs of radius ``eps |phi'| / 8`` about the centres.  When those
    overlap, a common target value is solved for from both centres.
    """
    if not isinstance(g, LaurentSeries):
        raise InputError("g must be a Laurent series")
    k0 = g.valuation
    if g.is_zero or k0 > -2:
        raise InputError(f"the witness needs a pole of order >= 2 in g (valuation {k0})")
    lam = _root_of_unity(-k0)
    phi = LogDevelopingMap(g, c, z0)
    phi.theta = theta
    attempts = []
    for eps in epsilon_range:
        eps = float(eps)
        a, b = eps, lam * eps
        fa, fb = complex(phi.evaluate(a)), complex(phi.evaluate(b))
        rho1 = eps * abs(complex(phi.derivative(a))) / 8.0
        rho2 = eps * abs(complex(phi.derivative(b))) / 8.0
        gap = abs(fa - fb)
        rec = {"epsilon": eps, "gap": gap, "koebe_sum": rho1 + rho2}
        attempts.append(rec)
        if gap >= rho1 + rho2:
            rec["overlap"] = False
            continue
        rec["overlap"] = True
        target = fa + rho1 / (rho1 + rho2) * (fb - fa)
        z1 = _newton_match(phi, target, a, theta)
        z2 = _newton_match(phi, target, b, theta)
        if z1 is None or z2 is None:
            continue
        if abs(z1 - a) >= eps / 2 or abs(z2 - b) >= eps / 2:
            rec["left_ball"] = True
            continue
        d = _verified(phi, z1, z2, theta)
        if d is not None:
            return ProbeVerdict("collision", z1, z2, d, samples_used=len(attempts),
                                resolution={"epsilon": eps, "lambda": complex_to_json(lam),
                                            "k0": int(k0)},
                                details={"attempts": attempts})
    return ProbeVerdict("inconclusive", samples_used=len(attempts),
                        resolution={"epsilon_range": [float(e) for e in epsilon_range],
                                    "k0": int(k0)},
                        details={"attempts": attempts})


def _sphere_mean(points) -> np.ndarray:
    m = points.mean(axis=0)
    nrm = np.linalg.norm(m)
    return m / nrm if nrm > 0 else m


def _level_values(dev, base, n_r, sector, k_from, k_to):
    """Values of ``dev`` on levels ``k_from..k_to``; one continuation per ray
    serves every level when the map offers polar evaluation."""
    if hasattr(dev, "evaluate_polar"):
        grid = base.reshape(n_r, -1)
        radii0, angles = np.abs(grid[:, 0]), np.angle(grid[0])
        allr = np.concatenate([radii0 * sector.ratio ** k for k in range(k_from, k_to + 1)])
        try:
            W = np.asarray(dev.evaluate_polar(allr, angles, sector.theta), dtype=complex)
            return [W[i * n_r:(i + 1) * n_r].ravel() for i in range(k_to - k_from + 1)]
        except (NumericalFailure, InputError):
            pass
    out = []
    for k in range(k_from, k_to + 1):
        try:
            out.append(np.asarray(dev.evaluate(base * sector.ratio ** k, sector.theta),
                                  dtype=complex))
        except (NumericalFailure, InputError, FloatingPointError) as exc:
            out.append(exc)
            break
    return out


def accumulation_probe(dev: DevelopingMap, sector: AnnulusSector = AnnulusSector(),
                       depth: int | None = None, grid_n: int = 33,
                       tolerances: Tolerances = DEFAULTS, max_depth: int | None = None
                       ) -> ProbeVerdict:
    """Image of the sector under ``dev o Lambda**k``, ``Lambda(z) = (r / R) z``,
    for ``k = 0..depth``.

    ``limit`` is reported when the deepest level has spherical diameter below
    ``limit_tol`` and its centre agrees with the previous level's; otherwise
    ``spread`` with the deepest diameter.  With ``max_depth > depth`` the
    probe keeps descending, ``depth`` levels at a time, while the diameters
    are still shrinking.
    """
    depth = tolerances.probe_depth if depth is None else int(depth)
    max_depth = depth if max_depth is None else max(int(max_depth), depth)
    tol = tolerances.limit_tol
    base = sector.grid(grid_n)
    diameters, centres = [], []
    last = None
    k_from, k_to = 0, depth
    while True:
        for i, w in enumerate(_level_values(dev, base, grid_n, sector, k_from, k_to)):
            k = k_from + i
            if isinstance(w, Exception):
                return _truncated(k, diameters, base, grid_n, sector, str(w))
            if np.any(np.isnan(w.real) | np.isnan(w.imag)):
                return _truncated(k, diameters, base, grid_n, sector, "non-finite values")
            P = sphere_point(w)
            diameters.append(spherical_diameter(P))
            centres.append(_sphere_mean(P))
            last = P
        step = float(np.linalg.norm(centres[-1] - centres[-2])) if len(centres) > 1 else 0.0
        settled = diameters[-1] < tol and step < tol
        shrinking = len(diameters) > 3 and np.all(np.diff(diameters[-4:]) < 0)
        if settled or not shrinking or k_to >= max_depth:
            break
        k_from, k_to = k_to + 1, min(max_depth, k_to + depth)
    res = {"depth": k_to, "grid_n": grid_n, "ratio": sector.ratio,
           "sector": [sector.r, sector.R, sector.theta, sector.t]}
    details = {"diameters": [float(d) for d in diameters], "centre_step": step}
    n_samples = len(base) * len(diameters)
    if settled:
        return ProbeVerdict("limit", point=from_sphere(_sphere_mean(last)), spread=diameters[-1],
                            samples_used=n_samples, resolution=res, details=details)
    return ProbeVerdict("spread", spread=diameters[-1], samples_used=n_samples,
                        resolution=res, details=details)


def _truncated(k, diameters, base, grid_n, sector, why):
    return ProbeVerdict("truncated", spread=diameters[-1] if diameters else None,
                        samples_used=len(base) * k,
                        resolution={"depth_reached": k - 1, "grid_n": grid_n,
                                    "ratio": sector.ratio},
                        details={"reason": why, "diameters": [float(d) for d in diameters]})


def power_form_probe(H, alpha, sector: AnnulusSector = AnnulusSector(), depth=None,
                     grid_n: int = 33, tolerances: Tolerances = DEFAULTS,
                     max_depth=None) -> ProbeVerdict:
    """:func:`accumulation_probe` for ``f = H(z) z**alpha`` on the slit branch."""
    if isinstance(H, DevelopingMap):
        inner = H

        def h(z):
            return inner.evaluate(z, sector.theta)
    else:
        h = H
    f = PowerDevelopingMap(h, alpha)
    return accumulation_probe(f, sector, depth, grid_n, tolerances, max_depth)


def write_samples_csv(path, z, w) -> None:
    """``z_re, z_im, w_re, w_im`` rows; the point at infinity is written as ``inf``."""
    z = np.ravel(np.asarray(z, dtype=complex))
    w = np.ravel(np.asarray(w, dtype=complex))
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["z_re", "z_im", "w_re", "w_im"])
        for a, b in zip(z, w):
            if np.isfinite(b):
                out.writerow([repr(float(a.real)), repr(float(a.imag)),
                              repr(float(b.real)), repr(float(b.imag))])
            else:
                out.writerow([repr(float(a.real)), repr(float(a.imag)), "inf", "inf"])
