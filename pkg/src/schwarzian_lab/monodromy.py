"""Local monodromy around the puncture, its classification, and the
logarithmic decomposition of parabolic developing maps.

Sign conventions used throughout:

* loops are positively oriented circles ``|z| = r`` based at ``z = r``;
* :func:`parabolic_translation` returns the jump ``phi(start) - phi(end)``;
* a :class:`LogDecomposition` writes ``phi = g + (c / 2 pi i) ln(z / z0)``, so
  its ``c`` is the opposite of that jump.  The residue law reads
  ``res_0 xi = -c / (a_{-1} pi i)`` in this convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Tolerances
from .developing import DevelopingMap
from .errors import (AmbiguousClassification, InconsistentJumpError, InputError,
                     NumericalFailure)
from .mobius import MobiusMap
from .ode import (FundamentalPair, PathSpec, QuotientDevelopingMap, XiField,
                  continue_along_path, _Line, _Ray, _Stepper)
from .series import LaurentSeries, coefficients_from_samples, complex_to_json

__all__ = [
    "IDENTITY", "ELLIPTIC_FINITE", "ELLIPTIC_IRRATIONAL", "PARABOLIC", "HYPERBOLIC",
    "LOXODROMIC",
    "MonodromyReport",
    "LogDecomposition",
    "ResidueReport",
    "classify",
    "elliptic_order",
    "puncture_monodromy",
    "parabolic_normalizer",
    "parabolic_translation",
    "log_decompose",
    "residue_check",
]

IDENTITY = "Identity"
ELLIPTIC_FINITE = "EllipticFinite"
ELLIPTIC_IRRATIONAL = "EllipticIrrational"
PARABOLIC = "Parabolic"
HYPERBOLIC = "Hyperbolic"
LOXODROMIC = "Loxodromic"

# relative size of N**2 against |N|**2 beyond which N = M -+ I is not nilpotent
_NILPOTENT_TOL = 1e-4


def _as_map(m) -> MobiusMap:
    return m if isinstance(m, MobiusMap) else MobiusMap.from_matrix(m)


def elliptic_order(m, k_max: int | None = None, tol: float | None = None,
                   tolerances: Tolerances = DEFAULTS):
    """Smallest ``k <= k_max`` with ``m**k = +-I``, or ``None``.

    The eigenvalues of an elliptic ``m`` are ``exp(+-i alpha)`` with
    ``trace = 2 cos alpha``; ``m**k = +-I`` exactly when ``k alpha`` is a
    multiple of ``pi``.

    >>> elliptic_order(MobiusMap.rotation(np.pi / 3))
    3
    """
    m = _as_map(m)
    k_max = tolerances.k_max if k_max is None else int(k_max)
    tol = tolerances.order_tol if tol is None else tol
    tr2 = m.trace_squared()
    if abs(tr2.imag) > tolerances.imag_tol * max(1.0, abs(tr2)) or not (
            -tolerances.classification_band <= tr2.real < 4 - tolerances.classification_band):
        raise InputError(f"elliptic_order needs an elliptic map (trace^2 = {tr2:.6g})")
    alpha = math.acos(min(1.0, max(-1.0, (m.trace().real) / 2.0)))
    x = alpha / math.pi
    k = np.arange(1, k_max + 1)
    d = np.abs(k * x - np.round(k * x))
    hits = np.nonzero(d < tol)[0]
    for j in hits:
        kk = int(k[j])
        P = np.linalg.matrix_power(m.matrix, kk)
        I = np.eye(2)
        if min(np.max(np.abs(P - I)), np.max(np.abs(P + I))) < max(1e-6, 1e-10 * kk):
            return kk
    return None


def classify(m, tolerances: Tolerances = DEFAULTS):
    """``(class_name, order)`` from ``trace**2``; ``order`` is only set for
    :data:`ELLIPTIC_FINITE`.

    Within the band around 4 the matrix itself decides: ``M -+ I`` small is the
    identity, nilpotent is parabolic, anything else raises
    :class:`AmbiguousClassification`.
    """
    m = _as_map(m)
    tr2 = m.trace_squared()
    band = tolerances.classification_band
    if abs(tr2.imag) > tolerances.imag_tol * max(1.0, abs(tr2)):
        return LOXODROMIC, None
    x = tr2.real
    if x < -band:
        return LOXODROMIC, None
    if abs(x - 4.0) <= band:
        s = 1.0 if m.trace().real >= 0 else -1.0
        N = m.matrix - s * np.eye(2)
        nn = np.max(np.abs(N))
        if nn < tolerances.identity_tol:
            return IDENTITY, None
        if np.max(np.abs(N @ N)) > _NILPOTENT_TOL * nn * nn:
            raise AmbiguousClassification(
                f"trace^2 = {tr2:.10g} is within {band:g} of 4 but M -+ I is not nilpotent")
        return PARABOLIC, None
    if x > 4.0:
        return HYPERBOLIC, None
    k = elliptic_order(m, tolerances=tolerances)
    return (ELLIPTIC_FINITE, k) if k is not None else (ELLIPTIC_IRRATIONAL, None)


@dataclass
class MonodromyReport:
    """Monodromy of one positively oriented loop around the puncture."""

    matrix: MobiusMap
    trace_squared: complex
    cls: str
    order: int | None = None
    translation_c: complex | None = None
    loop_radius: float = 0.5
    reference_point: complex | None = None
    diagnostics: dict = field(default_factory=dict)
    developing_map: DevelopingMap | None = field(default=None, repr=False)

    @property
    def label(self) -> str:
        return f"{self.cls}({self.order})" if self.cls == ELLIPTIC_FINITE else self.cls

    @property
    def uniformizable_candidate(self) -> bool:
        """False for hyperbolic and loxodromic monodromy, which no
        uniformizable structure can have around a puncture."""
        return self.cls not in (HYPERBOLIC, LOXODROMIC, ELLIPTIC_IRRATIONAL)

    def to_json(self) -> dict:
        M = self.matrix.matrix
        return {
            "class": self.cls,
            "label": self.label,
            "order": self.order,
            "matrix": [[complex_to_json(x) for x in row] for row in M],
            "trace": complex_to_json(self.matrix.trace()),
            "trace_squared": complex_to_json(self.trace_squared),
            "translation_c": None if self.translation_c is None
            else complex_to_json(self.translation_c),
            "loop_radius": self.loop_radius,
            "reference_point": None if self.reference_point is None
            else complex_to_json(self.reference_point),
            "diagnostics": {k: float(v) for k, v in sorted(self.diagnostics.items())},
        }


def parabolic_normalizer(M) -> np.ndarray:
    """Unit-determinant ``P = [w, e]`` with ``e`` the eigenvector of ``M``, so
    that ``P**-1 M P = +-[[1, 0], [s, 1]]``: the quotient of the pair ``Y P``
    then has monodromy ``phi -> phi + s``."""
    M = np.asarray(M, dtype=complex)
    lam = 1.0 if np.trace(M).real >= 0 else -1.0
    N = M - lam * np.eye(2)
    r0, r1 = N[0], N[1]
    row = r0 if np.linalg.norm(r0) >= np.linalg.norm(r1) else r1
    e = np.array([row[1], -row[0]])
    if np.linalg.norm(e) == 0:
        e = np.array([0.0, 1.0], dtype=complex)
    e = e / np.linalg.norm(e)
    w = np.array([np.conj(e[1]), -np.conj(e[0])])
    return np.column_stack([w, e])


def _pair_at(field_: XiField, r: float, reference_point, tol: Tolerances):
    """Start matrix at ``z = r``: identity, or the standard pair at
    ``reference_point`` carried radially to ``r``."""
    if reference_point is None:
        return np.eye(2, dtype=complex)
    ref = complex(reference_point)
    st = _Stepper(field_, tol)
    Y, _ = st.run(_Line(ref, complex(r)), np.eye(2, dtype=complex))
    return Y


def puncture_monodromy(xi, r: float = 0.5, tolerances: Tolerances = DEFAULTS,
                       singularities=(), reference_point=None, theta: float = 1.5 * np.pi,
                       n_check: int = 64) -> MonodromyReport:
    """Continue once around ``|z| = r`` and classify the transfer matrix.

    With ``reference_point`` the matrix is written in the standard basis at that
    point, which makes its entries independent of ``r``.  For a parabolic
    class the developing map is normalized to translation monodromy and the
    jump ``phi(start) - phi(end)`` is reported as ``translation_c``.
    """
    field_ = XiField.coerce(xi, singularities)
    if not r > 0:
        raise InputError("loop radius must be positive")
    for s in field_.singularities:
        if abs(s) > tolerances.exclusion_margin and abs(s) <= r + tolerances.exclusion_margin:
            raise InputError(f"xi has a declared singularity at {s} inside the loop |z| = {r}")
    Y0 = _pair_at(field_, r, reference_point, tolerances)
    start = FundamentalPair.from_matrix(r, Y0)
    res = continue_along_path(field_, PathSpec.circle(r), start, tolerances)
    T = res.transfer_matrix
    M = MobiusMap.from_matrix(T)
    cls, k = classify(M, tolerances)
    diag = {"wronskian_drift": res.wronskian_drift, "det_drift": res.det_drift,
            "steps": res.steps, "det_raw": abs(np.linalg.det(T))}
    report = MonodromyReport(M, M.trace_squared(), cls, k, None, float(r),
                             None if reference_point is None else complex(reference_point), diag)
    dev = QuotientDevelopingMap(field_, start, (), theta, tolerances)
    if cls == PARABOLIC:
        dev = dev.normalized(parabolic_normalizer(T))
        report.translation_c = parabolic_translation(dev, r, n=n_check)
    elif cls in (ELLIPTIC_FINITE, ELLIPTIC_IRRATIONAL):
        _, vecs = np.linalg.eig(T)
        det = np.linalg.det(vecs)
        if abs(det) > 1e-12:
            dev = dev.normalized(vecs / np.sqrt(det))
    report.developing_map = dev
    return report


def parabolic_translation(dev: DevelopingMap, r: float = 0.5, n: int = 64,
                          start_angles=(0.0, 0.5 * np.pi, np.pi), rel_tol: float = 1e-6):
    """Jump ``c = phi(start) - phi(end)`` of ``dev`` over one positive loop.

    The jump is measured from several starting angles; a translation has the
    same jump everywhere, so disagreement means the monodromy is not a
    translation in this normalization.

    >>> from .developing import LogDevelopingMap
    >>> c = parabolic_translation(LogDevelopingMap(0.0, 2j * np.pi))
    >>> abs(c + 2j * np.pi) < 1e-12
    True
    """
    jumps = []
    for a in start_angles:
        _, vals = dev.on_circle(r, n, start_angle=a)
        v0, v1 = complex(vals[0]), complex(vals[-1])
        if not (np.isfinite(v0) and np.isfinite(v1)):
            raise InputError("developing map hits infinity on the loop; not in translation form")
        jumps.append(v0 - v1)
    jumps = np.array(jumps)
    c = complex(jumps[0])
    spread = float(np.max(np.abs(jumps - c)))
    if spread > rel_tol * max(1.0, abs(c)):
        raise InputError(
            f"non-parabolic monodromy: jump varies by {spread:.3g} along |z| = {r}")
    return c


@dataclass
class LogDecomposition:
    """``phi = g + (c / 2 pi i) ln(z / z0)`` on the sampling annulus."""

    c: complex
    z0: complex
    g: LaurentSeries
    a_minus1: complex
    k0: int | None
    radius: float
    jump_residual: float = 0.0
    dft_residual: float = 0.0

    def to_json(self) -> dict:
        return {
            "c": complex_to_json(self.c),
            "z0": complex_to_json(self.z0),
            "g": self.g.to_json(),
            "a_minus1": complex_to_json(self.a_minus1),
            "k0": self.k0,
            "radius": self.radius,
            "jump_residual": self.jump_residual,
            "dft_residual": self.dft_residual,
        }


def log_decompose(dev: DevelopingMap, c, z0=1.0, r: float = 0.5, window=(-8, 24),
                  M: int = 128, tolerances: Tolerances = DEFAULTS) -> LogDecomposition:
    """Recover ``g`` from ``phi - (c / 2 pi i) ln(z / z0)`` sampled on ``|z| = r``.

    Raises :class:`InconsistentJumpError` when the subtraction is not
    single-valued, i.e. ``c`` does not match the continuation of ``phi``.
    """
    lo, hi = (int(w) for w in window)
    c = complex(c)
    z0 = complex(z0)
    angles, vals = dev.on_circle(r, M)
    vals = np.asarray(vals, dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise InputError("developing map is infinite on the sampling circle; use another radius")
    logz = np.log(r) + 1j * angles
    h = vals - c / (2j * np.pi) * (logz - np.log(z0))
    scale = max(1.0, float(np.max(np.abs(h))))
    jump = float(abs(h[-1] - h[0]))
    if jump > tolerances.single_valued_tol * scale:
        raise InconsistentJumpError(
            f"phi - (c/2 pi i) ln(z/z0) jumps by {jump:.3g} around |z| = {r}; c does not match")
    g = coefficients_from_samples(h[:-1], r, lo, hi)
    zs = r * np.exp(1j * angles[:-1])
    dft_res = float(np.max(np.abs(g(zs) - h[:-1]))) / scale
    coeffs = g.window(lo, hi)
    thr = tolerances.a_minus1_threshold * max(float(np.max(np.abs(coeffs), initial=0.0)),
                                               float(np.max(np.abs(vals))))
    coeffs = np.where(np.abs(coeffs) < thr, 0.0, coeffs)
    g = LaurentSeries(coeffs, lo, 0.0, hi)
    nz = np.nonzero(coeffs)[0]
    k0 = int(lo + nz[0]) if len(nz) else None
    a_m1 = complex(coeffs[-1 - lo]) if lo <= -1 <= hi else 0j
    return LogDecomposition(c, z0, g, a_m1, k0, float(r), jump, dft_res)


@dataclass
class ResidueReport:
    applicable: bool
    residue_measured: complex | None
    residue_contour: complex | None
    residue_predicted: complex | None
    agree: bool | None
    leading_double_pole: complex | None = None

    def to_json(self) -> dict:
        def cj(z):
            return None if z is None else complex_to_json(z)

        return {
            "applicable": self.applicable,
            "residue_measured": cj(self.residue_measured),
            "residue_contour": cj(self.residue_contour),
            "residue_predicted": cj(self.residue_predicted),
            "agree": self.agree,
            "leading_double_pole": cj(self.leading_double_pole),
        }


def contour_residue(f, r: float, M: int = 256) -> complex:
    """``(1 / 2 pi i) \\oint_{|z|=r} f dz`` by the trapezoid rule."""
    z = r * np.exp(2j * np.pi * np.arange(M) / M)
    return complex(np.mean(np.asarray(f(z), dtype=complex) * z))


def residue_check(decomp: LogDecomposition, xi, tol: float | None = None,
                  contour_radius: float | None = None,
                  tolerances: Tolerances = DEFAULTS) -> ResidueReport:
    """Compare the residue of ``xi`` at 0 with ``-c / (a_{-1} pi i)``.

    ``xi`` is a Laurent series about 0, a callable, or an :class:`XiField`.
    The series coefficient and a contour integral are both reported when
    available; agreement requires every available measurement to match.
    """
    tol = tolerances.residue_tol if tol is None else tol
    field_ = XiField.coerce(xi)
    series = field_.series
    measured = None
    if series is not None:
        if abs(series.center) > 1e-14:
            raise InputError("xi series must be centred at the puncture")
        measured = series.coefficient(-1)
    rc = decomp.radius if contour_radius is None else contour_radius
    contour = contour_residue(field_, rc) if field_.func is not None or series is not None else None
    if decomp.a_minus1 == 0:
        lead = None
        if series is not None:
            lead = series.coefficient(-2)
        elif field_.func is not None:
            lead = contour_residue(lambda z: field_(z) * z, rc)
        return ResidueReport(False, measured, contour, None, None, lead)
    predicted = -decomp.c / (decomp.a_minus1 * np.pi * 1j)
    bound = tol * max(1.0, abs(predicted))
    checks = [v for v in (measured, contour) if v is not None]
    agree = bool(checks) and all(abs(v - predicted) < bound for v in checks)
    return ResidueReport(True, measured, contour, complex(predicted), agree)
