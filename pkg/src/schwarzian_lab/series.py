"""Truncated Laurent series over the complex numbers.

A :class:`LaurentSeries` stores the coefficients of the powers
``valuation, valuation + 1, ..., order`` of ``(z - center)``.  Terms above
``order`` are unknown, not zero, and every operation propagates the highest
power it can still vouch for.  A series whose ``order`` is ``math.inf`` is an
exact Laurent polynomial: ``z**2``, ``1/z`` or ``(1 - theta**2) / (2 z**2)``
are exact, while the reciprocal of ``1 - z`` is not.

>>> z = LaurentSeries.monomial(1)
>>> (1 + z) * (1 - z)
LaurentSeries([1.+0.j, 0.+0.j, -1.+0.j], valuation=0, order=inf)
>>> (1 - z).reciprocal(order=4).coefficient(3)
(1+0j)
"""
from __future__ import annotations

import math
from numbers import Number

import numpy as np
from scipy.special import binom

from .config import SERIES_ORDER, ZERO_THRESHOLD
from .errors import InputError, SeriesDivisionError

__all__ = [
    "LaurentSeries",
    "coefficients_from_samples",
    "sample_circle",
    "complex_to_json",
    "complex_from_json",
]

_CENTER_TOL = 1e-14
_DFT_NOISE = 1e-13


def _cancel(c, scale, threshold=ZERO_THRESHOLD):
    c[np.abs(c) <= threshold * scale] = 0.0
    return c


def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(v) -> complex:
    if isinstance(v, Number):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"expected a complex number as [re, im], got {v!r}")


class LaurentSeries:
    """Laurent series ``sum c_k (z - center)**(valuation + k)`` known up to ``order``.

    Leading zero coefficients are dropped, so ``valuation`` is the numerical
    order of vanishing.  Arithmetic decides what counts as zero: a result
    coefficient is set to exactly zero when its modulus is below
    :data:`ZERO_THRESHOLD` times the sum of the moduli of the terms that
    produced it (cancellation relative to the operands, not to the largest
    coefficient of the series).  The zero series has no coefficients.
    """

    __slots__ = ("center", "valuation", "coeffs", "order")

    def __init__(self, coeffs, valuation=0, center=0.0, order=None,
                 threshold=0.0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if not np.all(np.isfinite(c)):
            raise InputError("series coefficients must be finite")
        valuation = int(valuation)
        if order is None or order == math.inf:
            order = math.inf
        else:
            order = int(order)
            keep = order - valuation + 1
            if keep < len(c):
                c = c[:max(keep, 0)]
            elif keep > len(c):
                c = np.concatenate([c, np.zeros(keep - len(c), complex)])
        if len(c):
            scale = np.max(np.abs(c))
            if scale == 0.0:
                c = c[:0]
            else:
                nz = np.nonzero(np.abs(c) > threshold * scale)[0]
                first = nz[0]
                c = c[first:]
                valuation += int(first)
                if order == math.inf:
                    last = np.nonzero(c)[0][-1]
                    c = c[:last + 1]
        if not len(c):
            valuation = 0 if order == math.inf else order + 1
        self.coeffs = c
        self.valuation = valuation
        self.center = complex(center)
        self.order = order

    # -- constructors -----------------------------------------------------
    @classmethod
    def monomial(cls, power, coef=1.0, center=0.0):
        return cls([coef], valuation=power, center=center)

    @classmethod
    def constant(cls, value, center=0.0):
        return cls([value], 0, center)

    @classmethod
    def zero(cls, center=0.0, order=None):
        return cls([], 0, center, order)

    @classmethod
    def from_dict(cls, terms: dict, center=0.0, order=None):
        """Build from ``{power: coefficient}``."""
        if not terms:
            return cls.zero(center, order)
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, complex)
        for p, a in terms.items():
            c[p - lo] = a
        return cls(c, lo, center, order)

    # -- basic properties -------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.order == math.inf

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def truncation(self):
        """Relative truncation order ``N`` (number of known terms minus one)."""
        return self.order - self.valuation

    @property
    def powers(self) -> np.ndarray:
        return np.arange(self.valuation, self.valuation + len(self.coeffs))

    @property
    def top(self):
        """Highest power carried explicitly."""
        return self.valuation + len(self.coeffs) - 1

    def coefficient(self, power: int) -> complex:
        if power > self.order:
            raise InputError(f"power {power} lies beyond the truncation order {self.order}")
        k = power - self.valuation
        if 0 <= k < len(self.coeffs):
            return complex(self.coeffs[k])
        return 0j

    def leading(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(self.coeffs[0])

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of powers ``lo..hi`` (zeros where not stored)."""
        out = np.zeros(hi - lo + 1, complex)
        a, b = max(lo, self.valuation), min(hi, self.top)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeffs[a - self.valuation:b - self.valuation + 1]
        return out

    def truncate(self, order) -> "LaurentSeries":
        if order >= self.order:
            return self
        return LaurentSeries(self.coeffs, self.valuation, self.center, order)

    def _check_center(self, other: "LaurentSeries"):
        if abs(self.center - other.center) > _CENTER_TOL * max(1.0, abs(self.center)):
            raise InputError(
                f"series centers differ: {self.center} vs {other.center}")

    def _lift(self, other):
        if isinstance(other, LaurentSeries):
            self._check_center(other)
            return other
        if isinstance(other, Number):
            return LaurentSeries.constant(other, self.center)
        return NotImplemented

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        if self.is_zero and other.is_zero:
            return LaurentSeries.zero(self.center, None if order == math.inf else order)
        parts = [s for s in (self, other) if not s.is_zero]
        lo = min(s.valuation for s in parts)
        hi = max(s.top for s in parts)
        if order != math.inf:
            hi = min(hi, order)
        if hi < lo:
            return LaurentSeries.zero(self.center, order)
        wa, wb = self.window(lo, hi), other.window(lo, hi)
        c = _cancel(wa + wb, np.abs(wa) + np.abs(wb))
        return LaurentSeries(c, lo, self.center, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(-self.coeffs, self.valuation, self.center, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return LaurentSeries(self.coeffs * other, self.valuation, self.center, self.order)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            va = self.valuation if not self.is_zero else self.order + 1
            vb = other.valuation if not other.is_zero else other.order + 1
            order = min(va + other.order, vb + self.order)
            return LaurentSeries.zero(self.center, None if order == math.inf else order)
        order = min(self.valuation + other.order, other.valuation + self.order)
        v = self.valuation + other.valuation
        c = _cancel(np.convolve(self.coeffs, other.coeffs),
                    np.convolve(np.abs(self.coeffs), np.abs(other.coeffs)))
        return LaurentSeries(c, v, self.center, None if order == math.inf else order)

    __rmul__ = __mul__

    def reciprocal(self, order=None) -> "LaurentSeries":
        """Multiplicative inverse; ``order`` caps the relative truncation of an
        exact input (default :data:`SERIES_ORDER`)."""
        if self.is_zero:
            raise SeriesDivisionError("reciprocal of the zero series")
        a0 = self.coeffs[0]
        if self.is_exact and len(self.coeffs) == 1:
            return LaurentSeries([1.0 / a0], -self.valuation, self.center)
        n = self.truncation if not self.is_exact else (SERIES_ORDER if order is None else order)
        if order is not None:
            n = min(n, order)
        a = np.zeros(n + 1, complex)
        m = min(len(self.coeffs), n + 1)
        a[:m] = self.coeffs[:m]
        b = np.zeros(n + 1, complex)
        b[0] = 1.0 / a0
        absa = np.abs(a)
        for k in range(1, n + 1):
            acc = np.dot(a[1:k + 1], b[k - 1::-1])
            if abs(acc) > ZERO_THRESHOLD * np.dot(absa[1:k + 1], np.abs(b[k - 1::-1])):
                b[k] = -acc / a0
        return LaurentSeries(b, -self.valuation, self.center, -self.valuation + n)

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise SeriesDivisionError("division by zero scalar")
            return self * (1.0 / other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            raise InputError("only integer powers of a Laurent series are supported")
        if n < 0:
            return self.reciprocal() ** (-n)
        result = LaurentSeries.constant(1.0, self.center)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ---------------------------------------------------------
    def derivative(self) -> "LaurentSeries":
        order = self.order - 1
        if self.is_zero:
            return LaurentSeries.zero(self.center, None if order == math.inf else order)
        c = self.coeffs * self.powers
        return LaurentSeries(c, self.valuation - 1, self.center,
                             None if order == math.inf else order)

    def antiderivative_with_log(self, constant=0.0):
        """Term-wise antiderivative.

        Returns ``(F, L)`` with ``F' + L/(z - center)`` equal to ``self``; the
        ``(z - center)**-1`` coefficient becomes the logarithmic coefficient
        ``L``.  The constant term of ``F`` is ``constant``.
        """
        log_coef = self.coefficient(-1) if self.order >= -1 else 0j
        order = self.order + 1
        if self.is_zero:
            F = LaurentSeries.zero(self.center, None if order == math.inf else order)
            return F + constant, log_coef
        p = self.powers
        c = np.where(p == -1, 0.0, self.coeffs / np.where(p == -1, 1, p + 1))
        F = LaurentSeries(c, self.valuation + 1, self.center,
                          None if order == math.inf else order)
        return F + constant, log_coef

    def integrate(self, constant=0.0) -> "LaurentSeries":
        F, L = self.antiderivative_with_log(constant)
        if L != 0:
            raise InputError("series has a (z - center)**-1 term; use antiderivative_with_log")
        return F

    # -- composition and re-expansion --------------------------------------
    def compose(self, inner: "LaurentSeries", order=None) -> "LaurentSeries":
        """``self(inner(z))`` expanded about ``inner.center``.

        ``self`` is a series in ``w - self.center``; the difference
        ``t = inner - self.center`` must have positive valuation unless
        ``self`` is an exact Laurent polynomial.
        """
        t = inner - self.center
        if t.is_zero:
            raise InputError("inner series coincides with the outer center")
        vt = t.valuation
        target = math.inf
        if not self.is_exact:
            if vt < 1:
                raise InputError(
                    "composition needs inner - outer.center of positive valuation "
                    "when the outer series is truncated")
            target = (self.order + 1) * vt - 1
        if order is not None:
            target = min(target, order)
        result = LaurentSeries.zero(inner.center)
        if self.is_zero:
            return LaurentSeries.zero(inner.center, None if target == math.inf else target)

        def cap(s):
            return s if target == math.inf else s.truncate(target)

        hi = self.top
        if hi >= 0:
            acc = LaurentSeries.constant(0.0, inner.center)
            for p in range(hi, -1, -1):
                acc = cap(acc * t + self.coefficient(p))
            result = acc
        lo = self.valuation
        if lo < 0:
            tinv = t.reciprocal()
            acc = LaurentSeries.constant(0.0, inner.center)
            for p in range(lo, 0):
                acc = cap((acc + self.coefficient(p)) * tinv)
            result = result + acc
        if target != math.inf:
            result = LaurentSeries(result.coeffs, result.valuation, result.center,
                                   min(result.order, target))
        return result

    def recenter(self, new_center, order: int = SERIES_ORDER) -> "LaurentSeries":
        """Taylor expansion about ``new_center`` of the Laurent polynomial formed
        by the stored coefficients, kept through power ``order``.

        Only meaningful when ``new_center`` lies where the series converges.
        """
        d = complex(new_center) - self.center
        if d == 0:
            return self.truncate(order)
        j = np.arange(order + 1)
        out = np.zeros(order + 1, complex)
        for p, a in zip(self.powers, self.coeffs):
            if a == 0:
                continue
            if p >= 0:
                jj = j[j <= p]
                out[:len(jj)] += a * binom(p, jj) * d ** (p - jj).astype(float)
            else:
                # scipy's binom is nan for negative integer p; use reflection
                out += a * (-1.0) ** j * binom(j - p - 1, j) * d ** (p - j).astype(float)
        exact = self.is_exact and self.valuation >= 0 and self.top <= order
        return LaurentSeries(out, 0, new_center, None if exact else order)

    def taylor_scaled(self, point, order: int, scale: float, shift: int = 0) -> np.ndarray:
        """``c_j * scale**(j + shift)`` for the Taylor coefficients ``c_j`` about
        ``point``, ``j = 0..order``.

        Grouping the powers as ``d**(p + shift) * (scale / d)**(j + shift)``
        keeps every factor in range when ``point`` is very close to a pole.
        """
        d = complex(point) - self.center
        j = np.arange(order + 1)
        out = np.zeros(order + 1, complex)
        for p, a in zip(self.powers, self.coeffs):
            if a == 0:
                continue
            if p >= 0:
                jj = j[j <= p]
                out[:len(jj)] += a * binom(p, jj) * d ** (p - jj).astype(float) \
                    * float(scale) ** (jj + shift).astype(float)
            elif d == 0:
                raise InputError("Taylor data requested at a pole")
            else:
                ratio = float(scale) / d
                out += (a * (-1.0) ** j * binom(j - p - 1, j) * d ** float(p + shift)
                        * ratio ** (j + shift).astype(float))
        return out

    def __call__(self, z):
        """Evaluate the stored Laurent polynomial at ``z`` (scalar or array)."""
        t = np.asarray(z, dtype=complex) - self.center
        if self.is_zero:
            return np.zeros_like(t) if t.ndim else 0j
        acc = np.zeros_like(t)
        for a in self.coeffs[::-1]:
            acc = acc * t + a
        with np.errstate(divide="ignore", invalid="ignore"):
            out = acc * t ** self.valuation if self.valuation else acc
        return out if t.ndim else complex(out)

    # -- comparisons / io -------------------------------------------------
    def residual(self, other: "LaurentSeries", upto=None) -> float:
        """Max coefficient modulus of ``self - other`` over the powers both know."""
        self._check_center(other)
        hi = min(self.order, other.order)
        if upto is not None:
            hi = min(hi, upto)
        parts = [s for s in (self, other) if not s.is_zero]
        if not parts:
            return 0.0
        lo = min(s.valuation for s in parts)
        if hi == math.inf:
            hi = max(s.top for s in parts)
        if hi < lo:
            return 0.0
        d = self.window(lo, hi) - other.window(lo, hi)
        return float(np.max(np.abs(d)))

    def to_json(self) -> dict:
        out = {
            "center": complex_to_json(self.center),
            "valuation": int(self.valuation),
            "coefficients": [complex_to_json(c) for c in self.coeffs],
        }
        if not self.is_exact:
            out["order"] = int(self.order)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LaurentSeries":
        try:
            coeffs = [complex_from_json(c) for c in data["coefficients"]]
            valuation = int(data.get("valuation", 0))
            center = complex_from_json(data.get("center", [0.0, 0.0]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed series JSON: {exc}") from exc
        return cls(coeffs, valuation, center, data.get("order"))

    def __repr__(self):
        order = "inf" if self.is_exact else self.order
        extra = f", center={self.center}" if self.center else ""
        return (f"LaurentSeries({np.array2string(self.coeffs, separator=', ')}, "
                f"valuation={self.valuation}, order={order}{extra})")


def sample_circle(f, radius: float, M: int, center=0.0) -> np.ndarray:
    """Values of ``f`` at ``center + radius * exp(2 pi i j / M)``, ``j = 0..M-1``."""
    z = center + radius * np.exp(2j * np.pi * np.arange(M) / M)
    return np.asarray(f(z), dtype=complex)


def coefficients_from_samples(values, radius: float, v_min: int, v_max: int,
                              center=0.0) -> LaurentSeries:
    """Laurent coefficients ``a_v, v_min <= v <= v_max`` from equispaced circle samples.

    The trapezoid rule on the circle is a discrete Fourier transform, so a
    single FFT yields every coefficient; modes outside the window alias in
    with weight ``(radius / R)**M`` for a convergence radius ``R``.
    """
    values = np.asarray(values, dtype=complex)
    M = len(values)
    width = v_max - v_min + 1
    if width < 1:
        raise InputError("empty coefficient window")
    if 2 * width > M:
        raise InputError(
            f"window of {width} modes exceeds the {M // 2} resolvable with M={M} samples")
    F = np.fft.fft(values) / M
    v = np.arange(v_min, v_max + 1)
    scaled = F[np.mod(v, M)]
    scaled[np.abs(scaled) < _DFT_NOISE * np.max(np.abs(values), initial=0.0)] = 0.0
    a = scaled * float(radius) ** (-v.astype(float))
    return LaurentSeries(a, v_min, center, v_max)
