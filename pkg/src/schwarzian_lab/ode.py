"""Continuation of ``u'' + xi u / 2 = 0`` and developing maps as solution quotients.

The solver never integrates in the usual sense: at every node it builds the
local Taylor basis from the recurrence

    (n + 2)(n + 1) u_{n+2} = -1/2 sum_j xi_j u_{n-j}

and jumps a third of the way to the nearest declared singularity.  State is
carried as the fundamental matrix ``Y = [[u1, u2], [u1', u2']]``.
"""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Tolerances
from .developing import TWO_PI, DevelopingMap, branch_arg, branch_interval
from .errors import DegenerateInputError, InputError, NumericalFailure
from .mobius import INF, MobiusMap
from .schwarzian import schwarzian
from .series import LaurentSeries, complex_from_json, complex_to_json

__all__ = [
    "XiField",
    "FundamentalPair",
    "PathSpec",
    "ContinuationResult",
    "local_solution_basis",
    "continue_along_path",
    "developing_quotient",
    "QuotientDevelopingMap",
    "VariationResult",
    "variation_of_parameters",
    "thread_count",
]

_DFT_POINTS = 64
_DEFAULT_MAX_STEP = 0.5
_EVAL_MARGIN = 1e-290


def thread_count() -> int:
    """Worker cap, read from ``SCHWARZIAN_LAB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("SCHWARZIAN_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


class XiField:
    """The coefficient ``xi`` of the equation, as a series and/or a callable.

    ``series`` is a Laurent expansion (usually about the puncture); ``func``,
    when given, is used for pointwise values and local Taylor data away from
    the puncture.  ``singularities`` lists every point the continuation must
    avoid; a pole of ``series`` at its center is added automatically.
    """

    def __init__(self, series: LaurentSeries | None = None, func=None,
                 singularities=(), label: str = "xi"):
        if series is None and func is None:
            raise InputError("xi needs a series or a callable")
        self.series = series
        self.func = func
        sing = [complex(s) for s in singularities]
        if series is not None and series.valuation < 0 and not series.is_zero:
            if all(abs(s - series.center) > 1e-14 for s in sing):
                sing.append(complex(series.center))
        self.singularities = np.array(sing, dtype=complex)
        self.label = label

    @classmethod
    def coerce(cls, xi, singularities=()):
        if isinstance(xi, XiField):
            if len(singularities):
                extra = [s for s in singularities if s not in list(xi.singularities)]
                return XiField(xi.series, xi.func, list(xi.singularities) + extra, xi.label)
            return xi
        if isinstance(xi, LaurentSeries):
            return cls(series=xi, singularities=singularities)
        if callable(xi):
            return cls(func=xi, singularities=singularities)
        raise InputError(f"cannot interpret {type(xi).__name__} as a coefficient field")

    def __call__(self, z):
        if self.func is not None:
            return self.func(z)
        return self.series(z)

    def distance_to_singularity(self, p) -> float:
        if not len(self.singularities):
            return math.inf
        return float(np.min(np.abs(self.singularities - p)))

    def taylor(self, p, order: int, rho: float) -> np.ndarray:
        """Taylor coefficients ``xi_0..xi_order`` at ``p``."""
        sigma = rho if math.isfinite(rho) else 1.0
        k = np.arange(order + 1)
        return self.taylor_scaled(p, order, rho) / sigma ** (k + 2.0)

    def taylor_scaled(self, p, order: int, rho: float) -> np.ndarray:
        """``sigma**(j + 2) xi_j`` at ``p`` with ``sigma = rho`` (1 if infinite):
        the coefficients of ``sigma**2 xi(p + sigma tau)`` in ``tau``."""
        sigma = rho if math.isfinite(rho) else 1.0
        if self.func is None:
            return self.series.taylor_scaled(p, order, sigma, shift=2)
        s = 0.5 * sigma
        w = np.exp(2j * np.pi * np.arange(_DFT_POINTS) / _DFT_POINTS)
        vals = np.asarray(self.func(p + s * w), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NumericalFailure("xi is not finite on a local sampling circle", location=p)
        F = np.fft.fft(vals) / _DFT_POINTS
        k = np.arange(order + 1)
        return F[: order + 1] * 2.0 ** k.astype(float) * sigma ** 2


@dataclass(frozen=True)
class FundamentalPair:
    """Values and first derivatives of two solutions at ``base_point``."""

    base_point: complex
    u1: complex
    u1p: complex
    u2: complex
    u2p: complex

    @classmethod
    def standard(cls, base_point) -> "FundamentalPair":
        """``u1 = 1, u1' = 0`` and ``u2 = 0, u2' = 1``."""
        return cls(complex(base_point), 1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, base_point, Y) -> "FundamentalPair":
        Y = np.asarray(Y, dtype=complex)
        return cls(complex(base_point), complex(Y[0, 0]), complex(Y[1, 0]),
                   complex(Y[0, 1]), complex(Y[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.u1, self.u2], [self.u1p, self.u2p]], dtype=complex)

    @property
    def wronskian(self) -> complex:
        return self.u1 * self.u2p - self.u2 * self.u1p

    def quotient(self) -> complex:
        return INF if self.u2 == 0 else self.u1 / self.u2

    def to_json(self) -> dict:
        return {k: complex_to_json(getattr(self, k))
                for k in ("base_point", "u1", "u1p", "u2", "u2p")}


@dataclass(frozen=True)
class PathSpec:
    """A polyline, or a circle traversed ``turns`` times.

    ``orientation`` is ``+1`` for counter-clockwise circles; for polylines it
    reverses the vertex order when ``-1``.
    """

    kind: str = "circle"
    vertices: tuple = ()
    center: complex = 0j
    radius: float = 0.5
    start_angle: float = 0.0
    turns: int = 1
    orientation: int = 1

    def __post_init__(self):
        if self.kind not in ("circle", "polyline"):
            raise InputError(f"unknown path kind {self.kind!r}")
        if self.orientation not in (1, -1):
            raise InputError("orientation must be +1 or -1")
        if self.kind == "circle" and not self.radius > 0:
            raise InputError("circle radius must be positive")
        if self.kind == "polyline" and len(self.vertices) < 2:
            raise InputError("a polyline needs at least two vertices")

    @classmethod
    def circle(cls, radius, center=0j, start_angle=0.0, turns=1, orientation=1):
        return cls("circle", (), complex(center), float(radius), float(start_angle),
                   int(turns), int(orientation))

    @classmethod
    def polyline(cls, vertices, orientation=1):
        return cls("polyline", tuple(complex(v) for v in vertices), orientation=int(orientation))

    @classmethod
    def from_json(cls, data: dict) -> "PathSpec":
        try:
            kind = data["kind"]
            if kind == "circle":
                return cls.circle(data.get("radius", 0.5),
                                  complex_from_json(data.get("center", [0.0, 0.0])),
                                  data.get("start_angle", 0.0), data.get("turns", 1),
                                  data.get("orientation", 1))
            if kind == "polyline":
                return cls.polyline([complex_from_json(v) for v in data["vertices"]],
                                    data.get("orientation", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed path JSON: {exc}") from exc
        raise InputError(f"unknown path kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "circle":
            return {"kind": "circle", "center": complex_to_json(self.center),
                    "radius": self.radius, "start_angle": self.start_angle,
                    "turns": self.turns, "orientation": self.orientation}
        return {"kind": "polyline", "vertices": [complex_to_json(v) for v in self.vertices],
                "orientation": self.orientation}

    @property
    def start(self) -> complex:
        if self.kind == "circle":
            return self.center + self.radius * np.exp(1j * self.start_angle)
        return self.vertices[0] if self.orientation > 0 else self.vertices[-1]

    def segments(self, min_steps: int = 0):
        """Pieces as ``(point(s), length)`` with ``s`` running over ``[0, 1]``."""
        if self.kind == "circle":
            n = max(int(min_steps), 4 * self.turns)
            span = self.orientation * TWO_PI * self.turns
            out = []
            for j in range(n):
                a0 = self.start_angle + span * j / n
                da = span / n
                out.append(_Arc(self.center, self.radius, a0, da))
            return out
        verts = list(self.vertices if self.orientation > 0 else self.vertices[::-1])
        per = max(1, math.ceil(min_steps / (len(verts) - 1))) if min_steps else 1
        out = []
        for a, b in zip(verts[:-1], verts[1:]):
            for j in range(per):
                out.append(_Line(a + (b - a) * j / per, a + (b - a) * (j + 1) / per))
        return out


class _Line:
    def __init__(self, a, b):
        self.a, self.b = complex(a), complex(b)
        self.length = abs(self.b - self.a)

    def point(self, s):
        return self.b if s == 1.0 else self.a + (self.b - self.a) * s

    def ds_for_chord(self, h, s=0.0):
        return h / self.length if self.length else 1.0


class _Ray:
    """Radial segment ``r0 e^{ia} -> r1 e^{ia}`` with ``|z|`` geometric in ``s``,
    so that points keep full relative precision however deep the descent."""

    def __init__(self, angle, r0, r1):
        self.e = np.exp(1j * angle)
        self.r0, self.r1 = float(r0), float(r1)
        self.L = math.log(self.r1 / self.r0)

    def radius(self, s):
        return self.r1 if s == 1.0 else self.r0 * math.exp(s * self.L)

    def point(self, s):
        return self.radius(s) * self.e

    def ds_for_chord(self, h, s=0.0):
        r = self.radius(s)
        if self.L < 0:
            if h >= r:
                return 1.0
            return math.log1p(-h / r) / self.L
        return math.log1p(h / r) / self.L


class _Arc:
    def __init__(self, center, radius, a0, da):
        self.c, self.R, self.a0, self.da = complex(center), float(radius), float(a0), float(da)

    def point(self, s):
        return self.c + self.R * np.exp(1j * (self.a0 + self.da * s))

    def ds_for_chord(self, h, s=0.0):
        if h >= 2 * self.R:
            return 0.25 * TWO_PI / abs(self.da)
        return 2.0 * math.asin(h / (2 * self.R)) / abs(self.da)


def _basis_coeffs(xi_c, N: int) -> np.ndarray:
    """Taylor coefficients of the standard basis, shape ``(2, N + 1)``."""
    U = np.zeros((2, N + 1), dtype=complex)
    U[0, 0] = 1.0
    U[1, 1] = 1.0
    x = np.zeros(N + 1, dtype=complex)
    m = min(len(xi_c), N + 1)
    x[:m] = xi_c[:m]
    for n in range(N - 1):
        s = U[:, n::-1] @ x[: n + 1]
        U[:, n + 2] = -0.5 * s / ((n + 2) * (n + 1))
    return U


def _propagator(U: np.ndarray, t: complex) -> np.ndarray:
    """``[[u1(t), u2(t)], [u1'(t), u2'(t)]]`` for the local basis ``U``."""
    N = U.shape[1] - 1
    k = np.arange(N + 1)
    pw = t ** k
    vals = U @ pw
    dpw = np.zeros(N + 1, dtype=complex)
    dpw[1:] = k[1:] * t ** (k[1:] - 1)
    ders = U @ dpw
    return np.array([[vals[0], vals[1]], [ders[0], ders[1]]])


def _tail_error(U: np.ndarray, h: float) -> float:
    N = U.shape[1] - 1
    k = np.arange(N + 1)
    mag = np.abs(U) * h ** k.astype(float)
    head = 1.0 + np.max(np.sum(mag, axis=1))
    tail = np.max(mag[:, N - 1:].sum(axis=1)) * max(1.0, N / max(h, 1e-300))
    return tail / head


def local_solution_basis(xi: LaurentSeries, order: int = 24):
    """The two solutions with ``u(z*) = 1, u'(z*) = 0`` and ``u(z*) = 0,
    u'(z*) = 1`` as series about ``z* = xi.center``, through power ``order``.

    >>> u1, u2 = local_solution_basis(LaurentSeries.constant(-2.0), 6)
    >>> [round(c.real, 6) for c in u1.coeffs]
    [1.0, 0.0, 0.5, 0.0, 0.041667, 0.0, 0.001389]
    """
    if not xi.is_zero and xi.valuation < 0:
        raise InputError(
            f"xi has a pole at {xi.center}; choose an ordinary base point for the local basis")
    if order < 1:
        raise InputError("order must be at least 1")
    x = xi.window(0, min(order, xi.order if not xi.is_exact else order))
    U = _basis_coeffs(x, order)
    return (LaurentSeries(U[0], 0, xi.center, order),
            LaurentSeries(U[1], 0, xi.center, order))


@dataclass
class ContinuationResult:
    """End state and diagnostics of one continuation.

    ``transfer`` is ``Y0**-1 Phi Y0`` where ``Phi`` maps the start state to
    the end state: it expresses the continued solutions in the start basis,
    so for a closed loop it is the monodromy matrix.  Unpacks as
    ``(end, transfer)``.
    """

    start: FundamentalPair
    end: FundamentalPair
    propagator: np.ndarray
    transfer_matrix: np.ndarray
    steps: int
    wronskian_drift: float
    det_drift: float
    nodes: list = field(default_factory=list, repr=False)

    @property
    def transfer(self) -> MobiusMap:
        return MobiusMap.from_matrix(self.transfer_matrix)

    def __iter__(self):
        yield self.end
        yield self.transfer


class _Stepper:
    """Shared machinery for stepping a fundamental matrix along segments."""

    def __init__(self, xi: XiField, tol: Tolerances, max_step=None):
        self.xi = xi
        self.N = tol.continuation_order
        self.tol = tol.continuation_tol
        self.min_step = tol.min_step
        self.margin = tol.exclusion_margin
        self.max_step = _DEFAULT_MAX_STEP if max_step is None else float(max_step)
        self.steps = 0
        self.det_drift = 0.0
        self.cum = np.eye(2, dtype=complex)

    def basis_at(self, p):
        """Local basis in ``tau = (z - p) / sigma`` and the scale ``sigma``."""
        rho = self.xi.distance_to_singularity(p)
        if rho < self.margin:
            raise InputError(f"path comes within {rho:.3g} of a declared singularity at z={p}")
        sigma = rho if math.isfinite(rho) else 1.0
        x = self.xi.taylor_scaled(p, self.N, rho)
        return _basis_coeffs(x, self.N), rho, sigma

    def run(self, seg, Y, p=None):
        s = 0.0
        p = seg.point(0.0) if p is None else p
        while s < 1.0 - 1e-15:
            U, rho, sigma = self.basis_at(p)
            h = min(rho / 3.0, self.max_step)
            while _tail_error(U, h / sigma) > self.tol:
                h *= 0.5
                # collapse is judged against the local scale so that radial
                # descent towards the puncture stays legal at every depth
                if h < self.min_step * min(1.0, rho):
                    raise NumericalFailure("continuation step collapsed below the minimum",
                                           location=p)
            s_new = min(1.0, s + seg.ds_for_chord(h, s))
            q = seg.point(s_new)
            t = q - p
            if abs(t) > h * (1 + 1e-12):
                # chord longer than allowed (clipped arc): shrink
                s_new = s + 0.5 * (s_new - s)
                q = seg.point(s_new)
                t = q - p
            Phi = _propagator(U, t / sigma)
            # back from (u, du/dtau) to (u, du/dz)
            Phi[0, 1] *= sigma
            Phi[1, 0] /= sigma
            Y = Phi @ Y
            self.cum = Phi @ self.cum
            self.det_drift = max(self.det_drift, abs(np.linalg.det(self.cum) - 1.0))
            self.steps += 1
            p, s = q, s_new
        return Y, seg.point(1.0)


def continue_along_path(xi, path: PathSpec, start: FundamentalPair | None = None,
                        tolerances: Tolerances = DEFAULTS, singularities=(),
                        min_steps: int = 0, max_step=None, record: bool = False):
    """Analytic continuation of a fundamental pair along ``path``.

    ``min_steps`` forces at least that many equal pieces (each is still
    subdivided adaptively); ``record`` keeps the state at every piece end.
    """
    field_ = XiField.coerce(xi, singularities)
    if start is None:
        start = FundamentalPair.standard(path.start)
    if abs(start.base_point - path.start) > 1e-12 * max(1.0, abs(path.start)):
        raise InputError("the start pair is not based at the start of the path")
    Y0 = start.matrix
    W0 = np.linalg.det(Y0)
    if abs(W0) < 1e-300:
        raise DegenerateInputError("start pair has zero Wronskian")
    stepper = _Stepper(field_, tolerances, max_step)
    Y = Y0.copy()
    p = complex(path.start)
    wdrift = 0.0
    nodes = [(p, Y.copy())] if record else []
    for seg in path.segments(min_steps):
        Y, p = stepper.run(seg, Y, p)
        wdrift = max(wdrift, abs(np.linalg.det(Y) - W0) / abs(W0))
        if record:
            nodes.append((p, Y.copy()))
    Phi = Y @ np.linalg.inv(Y0)
    T = np.linalg.solve(Y0, Phi @ Y0)
    return ContinuationResult(start, FundamentalPair.from_matrix(p, Y), Phi, T,
                              stepper.steps, wdrift, stepper.det_drift, nodes)


def _quotient(Y):
    u1, u2 = Y[..., 0, 0], Y[..., 0, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u2 == 0, INF, u1 / np.where(u2 == 0, 1.0, u2))


class QuotientDevelopingMap(DevelopingMap):
    """``z -> u1(z) / u2(z)`` for a fundamental pair continued through the
    slit disc ``D \\ l^theta``.

    Points are reached from the base point by an arc of radius ``|base|``
    inside the slit sector, followed by a radial segment.
    """

    def __init__(self, xi, pair: FundamentalPair, singularities=(), theta: float = 1.5 * np.pi,
                 tolerances: Tolerances = DEFAULTS, label="u1/u2"):
        self.field = XiField.coerce(xi, singularities)
        self.pair = pair
        self.theta = theta
        # evaluation points may approach the puncture arbitrarily closely
        self.tol = dataclasses.replace(tolerances, exclusion_margin=_EVAL_MARGIN)
        self.label = label
        if abs(pair.wronskian) < 1e-14 * max(1.0, np.max(np.abs(pair.matrix))) ** 2:
            raise DegenerateInputError("fundamental pair is degenerate (Wronskian ~ 0)")
        b = pair.base_point
        if b == 0:
            raise InputError("base point must differ from the puncture")

    # -- continuation on the slit disc -----------------------------------
    def _arc(self, Y, r, a0, a1):
        if a1 == a0:
            return Y
        st = _Stepper(self.field, self.tol)
        Y, _ = st.run(_Arc(0j, r, a0, a1 - a0), Y)
        return Y

    def _radial(self, Y, a, r0, r1):
        if r1 == r0:
            return Y
        st = _Stepper(self.field, self.tol)
        Y, _ = st.run(_Ray(a, r0, r1), Y)
        return Y

    def _base_arg(self, theta):
        return float(branch_arg(self.pair.base_point, theta))

    def _ray_states(self, angles, radius_lists, theta):
        """States along rays: an arc at ``|base|`` visits every angle in order,
        then each ray is continued radially through its radii.  Returns one
        ``(len(radii), 2, 2)`` array per ray."""
        lo = branch_interval(theta)
        angles = lo + np.mod(np.asarray(angles, dtype=float) - lo, TWO_PI)
        rb = abs(self.pair.base_point)
        ab = self._base_arg(theta)
        Yb = self.pair.matrix
        order = np.argsort(angles, kind="stable")
        arc_states = np.empty((len(angles), 2, 2), dtype=complex)
        up = [j for j in order if angles[j] >= ab]
        down = [j for j in order[::-1] if angles[j] < ab]
        for seq in (up, down):
            Y, a = Yb, ab
            for j in seq:
                Y = self._arc(Y, rb, a, angles[j])
                a = angles[j]
                arc_states[j] = Y
        out = [None] * len(angles)

        def ray(j):
            radii = np.asarray(radius_lists[j], dtype=float)
            res = np.empty((len(radii), 2, 2), dtype=complex)
            rorder = np.argsort(radii, kind="stable")
            r_up = [i for i in rorder if radii[i] >= rb]
            r_down = [i for i in rorder[::-1] if radii[i] < rb]
            for seq in (r_up, r_down):
                Y, r = arc_states[j], rb
                for i in seq:
                    Y = self._radial(Y, angles[j], r, radii[i])
                    r = radii[i]
                    res[i] = Y
            out[j] = res

        workers = min(thread_count(), len(angles))
        if workers > 1 and len(angles) > 4:
            with ThreadPoolExecutor(workers) as ex:
                list(ex.map(ray, range(len(angles))))
        else:
            for j in range(len(angles)):
                ray(j)
        return out

    def states_polar(self, radii, angles, theta=None):
        """Fundamental matrices on the polar grid ``radii x angles``
        (angles taken in the branch interval); shape ``(len(radii), len(angles), 2, 2)``."""
        theta = self.theta if theta is None else theta
        radii = np.asarray(radii, dtype=float)
        rays = self._ray_states(angles, [radii] * len(np.atleast_1d(angles)), theta)
        return np.stack(rays, axis=1)

    def states(self, z, theta=None):
        theta = self.theta if theta is None else theta
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        ang, inv = np.unique(np.angle(z), return_inverse=True)
        groups = [np.nonzero(inv == j)[0] for j in range(len(ang))]
        rays = self._ray_states(ang, [np.abs(z[g]) for g in groups], theta)
        out = np.empty((len(z), 2, 2), dtype=complex)
        for g, res in zip(groups, rays):
            out[g] = res
        return out

    def evaluate(self, z, theta=None):
        z = np.asarray(z, dtype=complex)
        vals = _quotient(self.states(z.ravel(), theta)).reshape(z.shape)
        return vals if vals.ndim else complex(vals)

    def evaluate_polar(self, radii, angles, theta=None):
        return _quotient(self.states_polar(radii, angles, theta))

    def derivative(self, z, theta=None):
        z = np.asarray(z, dtype=complex)
        Y = self.states(z.ravel(), theta)
        u1, u2, u1p, u2p = Y[:, 0, 0], Y[:, 0, 1], Y[:, 1, 0], Y[:, 1, 1]
        with np.errstate(all="ignore"):
            d = ((u1p * u2 - u1 * u2p) / u2 ** 2).reshape(z.shape)
        return d if d.ndim else complex(d)

    def on_circle(self, r, n, start_angle=0.0, turns=1):
        theta = self.theta
        lo = branch_interval(theta)
        a_start = lo + float(np.mod(start_angle - lo, TWO_PI))
        rb = abs(self.pair.base_point)
        Y = self._arc(self.pair.matrix, rb, self._base_arg(theta), a_start)
        Y = self._radial(Y, a_start, rb, r)
        path = PathSpec.circle(r, 0j, a_start, turns)
        res = continue_along_path(self.field, path, FundamentalPair.from_matrix(path.start, Y),
                                  self.tol, min_steps=n * turns, record=True)
        Ys = np.array([y for _, y in res.nodes])
        angles = a_start + TWO_PI * np.arange(n * turns + 1) / n
        return angles, _quotient(Ys)

    def _value(self, z, logz):
        return self.evaluate(z)

    # -- local structure ---------------------------------------------------
    def local_series(self, z, order: int = 24, theta=None, scaled: bool = False) -> LaurentSeries:
        """Taylor series of the quotient about ``z`` (continued on the branch),
        or of ``u2/u1`` when ``u2(z)`` is small; either has the same Schwarzian.

        With ``scaled`` the series is in ``tau = (w - z) / sigma``, ``sigma`` the
        distance to the nearest singularity, and is centred at 0.
        """
        z = complex(z)
        Y = self.states([z], theta)[0]
        rho = self.field.distance_to_singularity(z)
        sigma = rho if math.isfinite(rho) else 1.0
        U = _basis_coeffs(self.field.taylor_scaled(z, order, rho), order)
        if scaled:
            center, d1 = 0.0, sigma
        else:
            k = np.arange(order + 1)
            U = U / sigma ** k
            U[1] *= sigma
            center, d1 = z, 1.0
        b1 = LaurentSeries(U[0], 0, center, order)
        b2 = LaurentSeries(U[1], 0, center, order)
        # the second basis element has unit derivative in the chosen variable
        u1 = Y[0, 0] * b1 + Y[1, 0] * d1 * b2
        u2 = Y[0, 1] * b1 + Y[1, 1] * d1 * b2
        if abs(Y[0, 1]) >= abs(Y[0, 0]):
            return u1 / u2
        return u2 / u1

    def schwarzian_residual(self, points, order: int = 20, compare: int = 8, theta=None) -> float:
        """Max over ``points`` of the discrepancy between the Schwarzian of the
        continued quotient and ``xi``.

        Both sides are compared in the scaled variable ``tau`` (where the
        Schwarzian picks up a factor ``sigma**2``), relative to
        ``max(1, |coefficients|)``, so the check means the same at any depth.
        """
        worst = 0.0
        for z in np.atleast_1d(points):
            z = complex(z)
            phi = self.local_series(z, order + 3, theta, scaled=True)
            S = schwarzian(phi)
            rho = self.field.distance_to_singularity(z)
            ref = LaurentSeries(self.field.taylor_scaled(z, order, rho), 0, 0.0, order)
            scale = max(1.0, float(np.max(np.abs(ref.window(0, compare)))))
            worst = max(worst, S.residual(ref, upto=compare) / scale)
        return worst

    def normalized(self, P) -> "QuotientDevelopingMap":
        """Same structure with the pair ``Y P``: post-composition by the Möbius
        map of ``P`` acting on ``(u1 : u2)``."""
        Y = self.pair.matrix @ np.asarray(P, dtype=complex)
        return QuotientDevelopingMap(self.field, FundamentalPair.from_matrix(self.pair.base_point, Y),
                                     (), self.theta, self.tol, self.label)


def developing_quotient(pair: FundamentalPair, xi, singularities=(), theta: float = 1.5 * np.pi,
                        tolerances: Tolerances = DEFAULTS) -> QuotientDevelopingMap:
    """Evaluation handle for ``u1 / u2``; values in the Riemann sphere."""
    return QuotientDevelopingMap(xi, pair, singularities, theta, tolerances)


@dataclass(frozen=True)
class VariationResult:
    """``phi(z) = z**exponent * F(z) + log_coef * ln z + constant``.

    ``F`` is a Laurent series; a nonzero ``exponent`` only appears for
    non-integer powers, where no logarithm can arise.
    """

    exponent: complex
    F: LaurentSeries
    log_coef: complex
    constant: complex

    def __call__(self, z, theta=np.pi):
        from .developing import branch_log

        lz = branch_log(z, theta)
        out = self.F(z) * np.exp(self.exponent * lz) + self.log_coef * lz + self.constant
        return out if np.ndim(out) else complex(out)

    def derivative(self, z, theta=np.pi):
        from .developing import branch_log

        lz = branch_log(z, theta)
        pw = np.exp(self.exponent * lz)
        return (self.F.derivative()(z) * pw + self.exponent * self.F(z) * pw / z
                + self.log_coef / z)


def variation_of_parameters(h: LaurentSeries, z0, const=0.0, exponent=0.0,
                            patch_radius=None, order=None) -> VariationResult:
    """A developing map ``phi`` with ``phi' = h**-2`` and ``phi(z0) = const``.

    ``h`` is ``(z - c)**exponent * h_series``.  The ``z**-1`` part of
    ``h**-2`` is returned as ``log_coef`` instead of being integrated.
    """
    if h.is_zero:
        raise DegenerateInputError("h vanishes identically")
    v = h.valuation
    H0 = LaurentSeries(h.coeffs, 0, h.center, None if h.is_exact else h.order - v)
    beta = complex(exponent) + v
    if h.is_exact and len(H0.coeffs) > 1:
        roots = np.roots(H0.coeffs[::-1])
        R = math.inf if patch_radius is None else patch_radius
        bad = roots[np.abs(roots) < R]
        if len(bad):
            raise InputError(f"h has a zero at z={h.center + bad[0]} inside the patch")
    inv2 = (H0 * H0).reciprocal(order=order)
    e = -2 * beta
    ei = round(e.real)
    z0 = complex(z0)
    if abs(e - ei) < 1e-12:
        P = inv2 * LaurentSeries.monomial(ei, 1.0, h.center) if ei else inv2
        F, L = P.antiderivative_with_log()
        result = VariationResult(0j, F, complex(L), 0j)
    else:
        n = inv2.powers
        F = LaurentSeries(inv2.coeffs / (n + 1 + e), inv2.valuation + 1, h.center,
                          None if inv2.is_exact else inv2.order + 1)
        result = VariationResult(e, F, 0j, 0j)
    shift = complex(const) - result(z0)
    return VariationResult(result.exponent, result.F, result.log_coef, shift)
