"""Problem specs, the analysis pipeline and sample export.

A problem spec names a Schwarzian differential ``xi`` near the puncture at 0,
either as a Laurent series or through one of two presets:

* ``{"power_theta": theta}``: ``xi = (1 - theta**2) / (2 z**2)``, the
  Schwarzian of ``z**theta``;
* ``{"log_with_g": {"g": series, "c": [re, im], "z0": [re, im]}}``: the
  Schwarzian of ``g + (c / 2 pi i) ln(z / z0)``.

The pipeline classifies the local monodromy, decomposes parabolic developing
maps, checks the residue law, computes both norms and runs the probes.  Its
report is plain JSON with sorted keys, so equal specs give equal bytes.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULTS, Tolerances
from .developing import branch_interval
from .errors import InconsistentJumpError, InputError
from .monodromy import (ELLIPTIC_FINITE, ELLIPTIC_IRRATIONAL, HYPERBOLIC, IDENTITY,
                        LOXODROMIC, PARABOLIC, LogDecomposition, MonodromyReport,
                        ResidueReport, log_decompose, puncture_monodromy, residue_check)
from .norms import NormReport, norm_report, relative_xi, surface_density
from .ode import XiField
from .probes import ProbeVerdict, accumulation_probe, koebe_witness
from .schwarzian import ramified_lift, schwarzian_from_derivative
from .series import LaurentSeries, complex_from_json, complex_to_json

__all__ = [
    "ProblemSpec",
    "AnalysisReport",
    "run_pipeline",
    "theorem_a_status",
    "export_samples",
    "dumps",
    "atomic_write",
    "CONSISTENT",
    "INCONSISTENT",
    "NOT_APPLICABLE",
]

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
NOT_APPLICABLE = "not_applicable"

DEFAULT_RADIUS = 0.5
# the accumulation probe on a continued quotient costs one ODE solve per ray
PIPELINE_PROBE_GRID = 9
PIPELINE_PROBE_MAX_DEPTH = 160


def parse_complex(v) -> complex:
    """``[re, im]``, a number, or a string such as ``"1/3"``, ``"i"`` or ``"0.3+0.1i"``."""
    if isinstance(v, str):
        s = v.strip().replace(" ", "")
        try:
            return complex(Fraction(s))
        except (ValueError, ZeroDivisionError):
            pass
        s = s.replace("i", "j")
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
        try:
            return complex(s)
        except ValueError:
            raise InputError(f"cannot read a complex number from {v!r}") from None
    return complex_from_json(v)


def _json_scalar(z: complex):
    return float(z.real) if z.imag == 0 else complex_to_json(z)


def _log_preset_fields(g: LaurentSeries, c: complex, z0: complex, order: int):
    """Series and pointwise form of ``S_z(g + (c / 2 pi i) ln(z / z0))``, and
    the critical points of the developing map inside the unit disc."""
    kappa = c / (2j * np.pi)
    dg = g.derivative()
    d1 = dg + LaurentSeries(np.array([kappa]), -1, 0.0, dg.order if not dg.is_exact else None)
    if d1.is_zero:
        raise InputError("g + (c/2 pi i) ln z is constant; its Schwarzian is undefined")
    xi = schwarzian_from_derivative(d1).truncate(order)
    # S = (C/A - 1.5 (B/A)**2) / z**2 with A = z**n f', B = z**(n+1) f'',
    # C = z**(n+2) f''' all regular at 0, so nothing overflows near the puncture
    n = max(0, -d1.valuation)
    d2 = d1.derivative()
    A = d1 * LaurentSeries.monomial(n)
    B = d2 * LaurentSeries.monomial(n + 1)
    C = d2.derivative() * LaurentSeries.monomial(n + 2)

    def func(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            a = A(z)
            return (C(z) / a - 1.5 * (B(z) / a) ** 2) / z ** 2

    crit = []
    if len(d1.coeffs) > 1:
        roots = np.roots(d1.coeffs[::-1])
        crit = [complex(r) for r in roots if 0 < abs(r) < 1]
    return xi, func, crit


@dataclass
class ProblemSpec:
    """One analysis problem about the puncture at 0."""

    xi: LaurentSeries
    source: dict
    declared_singularities: list = field(default_factory=list)
    loop_radius: float = DEFAULT_RADIUS
    radius_given: bool = False
    tolerances: Tolerances = DEFAULTS
    surface: str = "punctured_disc"
    relative: bool = False
    name: str | None = None
    func: object = field(default=None, repr=False)
    theta: complex | None = None
    log_data: tuple | None = None

    @classmethod
    def from_json(cls, data: dict) -> "ProblemSpec":
        if not isinstance(data, dict) or "xi" not in data:
            raise InputError("a problem spec is a JSON object with an 'xi' entry")
        unknown = set(data) - {"xi", "declared_singularities", "loop_radius", "tolerances",
                               "surface", "relative", "name"}
        if unknown:
            raise InputError(f"unknown spec keys: {sorted(unknown)}")
        tol = DEFAULTS.updated(data.get("tolerances"))
        raw = data["xi"]
        func, theta, log_data, crit = None, None, None, []
        if not isinstance(raw, dict):
            raise InputError("'xi' must be a series object or a preset")
        if "power_theta" in raw:
            theta = parse_complex(raw["power_theta"])
            xi = LaurentSeries.monomial(-2, (1 - theta ** 2) / 2.0)
            source = {"power_theta": _json_scalar(theta)}
        elif "log_with_g" in raw:
            p = raw["log_with_g"]
            if not isinstance(p, dict) or "g" not in p:
                raise InputError("log_with_g needs a 'g' series")
            g = LaurentSeries.from_json(p["g"])
            if abs(g.center) > 0:
                raise InputError("g must be expanded about the puncture at 0")
            c = parse_complex(p.get("c", [0.0, 0.0]))
            z0 = parse_complex(p.get("z0", [1.0, 0.0]))
            if z0 == 0:
                raise InputError("z0 must be nonzero")
            xi, func, crit = _log_preset_fields(g, c, z0, tol.series_order)
            log_data = (g, c, z0)
            source = {"log_with_g": {"g": g.to_json(), "c": complex_to_json(c),
                                     "z0": complex_to_json(z0)}}
        else:
            xi = LaurentSeries.from_json(raw)
            if abs(xi.center) > 0:
                raise InputError("xi must be expanded about the puncture at 0")
            source = {"series": xi.to_json()}
        sing = [parse_complex(s) for s in data.get("declared_singularities", [])]
        if xi.valuation < 0 and not xi.is_zero and all(s != 0 for s in sing):
            sing.append(0j)
        for s in crit:
            if all(abs(s - t) > 1e-12 for t in sing):
                sing.append(s)
        sing = sorted(sing, key=lambda s: (abs(s), s.real, s.imag))
        given = "loop_radius" in data
        r = float(data.get("loop_radius", DEFAULT_RADIUS))
        if not 0 < r < 1:
            raise InputError("loop_radius must lie in (0, 1)")
        inner = [abs(s) for s in sing if s != 0]
        if inner and min(inner) <= r:
            if given:
                raise InputError(f"a singularity at |z| = {min(inner):.6g} lies inside the "
                                 f"loop of radius {r}")
            r = 0.5 * min(inner)
        surface = str(data.get("surface", "punctured_disc")).replace("-", "_")
        if surface not in ("disc", "punctured_disc"):
            raise InputError(f"unknown surface {surface!r}")
        return cls(xi, source, sing, r, given, tol, surface, bool(data.get("relative", False)),
                   data.get("name"), func, theta, log_data)

    @classmethod
    def load(cls, path) -> "ProblemSpec":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read spec {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"spec {path} is not valid JSON: {exc}") from exc
        return cls.from_json(data)

    @property
    def field(self) -> XiField:
        return XiField(self.xi, self.func, self.declared_singularities, self.name or "xi")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "xi": self.source,
            "xi_series": self.xi.to_json(),
            "declared_singularities": [complex_to_json(s) for s in self.declared_singularities],
            "loop_radius": self.loop_radius,
            "surface": self.surface,
            "relative": self.relative,
        }


@dataclass
class AnalysisReport:
    spec: ProblemSpec
    monodromy: MonodromyReport
    decomposition: LogDecomposition | None
    residue: ResidueReport | None
    norms: NormReport
    probes: list
    theorem_a_status: str
    reasons: list = field(default_factory=list)
    lift_valuation: int | None = None

    @property
    def exit_code(self) -> int:
        if self.theorem_a_status == INCONSISTENT or self.monodromy.cls in (HYPERBOLIC, LOXODROMIC):
            return 1
        return 0

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "tolerances": self.spec.tolerances.as_dict(),
            "monodromy": self.monodromy.to_json(),
            "decomposition": None if self.decomposition is None else self.decomposition.to_json(),
            "residue": None if self.residue is None else self.residue.to_json(),
            "norms": self.norms.to_json(),
            "probes": [p.to_json() for p in self.probes],
            "theorem_a_status": self.theorem_a_status,
            "reasons": list(self.reasons),
            "lift_valuation": self.lift_valuation,
            "exit_code": self.exit_code,
        }


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return _clean(complex_to_json(obj))
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed float formatting)."""
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _numerical_valuation(s: LaurentSeries, rel: float) -> int:
    """Lowest power whose coefficient exceeds ``rel`` times the series size."""
    if s.is_zero:
        return 0
    thr = rel * max(1.0, float(np.max(np.abs(s.coeffs))))
    keep = [int(p) for p, c in zip(s.powers, s.coeffs) if abs(c) > thr]
    return min(keep, default=0)


def theorem_a_status(mono: MonodromyReport, decomp: LogDecomposition | None,
                     residue: ResidueReport | None, xi: LaurentSeries,
                     tolerances: Tolerances = DEFAULTS):
    """``(status, reasons, lift_valuation)`` for the local alternative.

    Finite-order elliptic monodromy (the identity counts as order 1) is
    consistent when the ramified lift has no pole; parabolic monodromy is
    consistent when ``g`` has at most a simple pole and, for ``a_{-1} != 0``,
    the residue law holds.  ``a_{-1} = 0`` is reported as not applicable.
    """
    cls = mono.cls
    if cls in (HYPERBOLIC, LOXODROMIC, ELLIPTIC_IRRATIONAL):
        return INCONSISTENT, [f"{cls} local monodromy cannot occur for a uniformizable "
                              "structure"], None
    if cls in (IDENTITY, ELLIPTIC_FINITE):
        k = 1 if cls == IDENTITY else int(mono.order)
        val = _numerical_valuation(ramified_lift(xi, k), tolerances.a_minus1_threshold)
        if val >= 0:
            return CONSISTENT, [f"lift to the {k}-sheeted covering is holomorphic"], val
        return INCONSISTENT, [f"lift to the {k}-sheeted covering keeps a pole of order {-val}"], val
    # parabolic
    if decomp is None:
        return NOT_APPLICABLE, ["no logarithmic decomposition available"], None
    if decomp.k0 is not None and decomp.k0 < -1:
        return INCONSISTENT, [f"g has a pole of order {-decomp.k0} >= 2, which forces "
                              "collisions of the developing map"], None
    if residue is None or not residue.applicable:
        return NOT_APPLICABLE, ["a_{-1} = 0: the residue law does not apply"], None
    if residue.agree:
        return CONSISTENT, ["residue of xi matches -c/(a_{-1} pi i)"], None
    return INCONSISTENT, ["residue of xi differs from -c/(a_{-1} pi i)"], None


def run_pipeline(spec: ProblemSpec, probes: bool = True) -> AnalysisReport:
    """classify -> decompose -> residue check -> norms -> probes."""
    tol = spec.tolerances
    fld = spec.field
    mono = puncture_monodromy(fld, spec.loop_radius, tol)
    decomp = residue = None
    reasons = []
    if mono.cls == PARABOLIC:
        c_log = -mono.translation_c
        try:
            decomp = log_decompose(mono.developing_map, c_log, 1.0, spec.loop_radius,
                                   tolerances=tol)
        except InconsistentJumpError as exc:
            reasons.append(f"decomposition failed: {exc}")
        if decomp is not None:
            residue = residue_check(decomp, fld, tolerances=tol)
    status, why, lift_val = theorem_a_status(mono, decomp, residue, spec.xi, tol)
    reasons.extend(why)
    norms = norm_report(spec.func if spec.func is not None else spec.xi, spec.surface,
                        spec.relative)
    verdicts = []
    if probes and mono.cls not in (HYPERBOLIC, LOXODROMIC):
        verdicts.append(accumulation_probe(mono.developing_map, grid_n=PIPELINE_PROBE_GRID,
                                           tolerances=tol, max_depth=PIPELINE_PROBE_MAX_DEPTH))
        if decomp is not None and decomp.k0 is not None and decomp.k0 <= -2:
            verdicts.append(koebe_witness(decomp.g, decomp.c, z0=decomp.z0))
    return AnalysisReport(spec, mono, decomp, residue, norms, verdicts, status, reasons,
                          lift_val)


def export_samples(spec: ProblemSpec, field_name: str, grid: int, path) -> int:
    """Write a CSV of the developing map or of the norm density; returns the
    number of data rows.

    ``developing``: polar grid, radii ``0.95 (i + 1) / n`` (rows) by angles
    across the slit branch (columns).  ``norm_density``: Cartesian grid
    ``linspace(-1, 1, n, endpoint=False)`` in both directions, which contains
    the origin; points off the surface get ``nan``.
    """
    n = int(grid)
    if n < 1:
        raise InputError("grid must be a positive integer")
    if field_name == "developing":
        mono = puncture_monodromy(spec.field, spec.loop_radius, spec.tolerances)
        dev = mono.developing_map
        lo = branch_interval(dev.theta)
        radii = 0.95 * np.arange(1, n + 1) / n
        angles = lo + 2 * np.pi * (np.arange(n) + 0.5) / n
        w = np.asarray(dev.evaluate_polar(radii, angles), dtype=complex)
        z = radii[:, None] * np.exp(1j * angles[None, :])
        header = ["re", "im", "val_re", "val_im"]
        rows = [(a, b) for a, b in zip(z.ravel(), w.ravel())]
        body = [[repr(float(a.real)), repr(float(a.imag)),
                 repr(float(b.real)) if np.isfinite(b) else "inf",
                 repr(float(b.imag)) if np.isfinite(b) else "inf"] for a, b in rows]
    elif field_name in ("norm_density", "norm-density"):
        xs = np.linspace(-1.0, 1.0, n, endpoint=False)
        z = xs[None, :] + 1j * xs[::-1][:, None]
        target = spec.func if spec.func is not None else spec.xi
        if spec.relative:
            target = relative_xi(target, spec.surface)
        d = surface_density(target, spec.surface, z)
        header = ["re", "im", "density"]
        body = [[repr(float(a.real)), repr(float(a.imag)), repr(float(v))]
                for a, v in zip(z.ravel(), d.ravel())]
    else:
        raise InputError(f"unknown field {field_name!r}; use 'developing' or 'norm_density'")
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in body)
    atomic_write(path, text)
    return len(body)


def atomic_write(path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc
