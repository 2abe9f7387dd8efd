"""Möbius transformations as unit-determinant 2x2 complex matrices."""
from __future__ import annotations

import cmath

import numpy as np

from .errors import DegenerateInputError
from .series import LaurentSeries

INF = complex(np.inf, 0.0)


def is_infinite(z) -> np.ndarray:
    return ~np.isfinite(np.asarray(z, dtype=complex))


class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` normalized to ``ad - bc = 1``.

    The sign of the matrix is kept as computed; classification only looks at
    ``trace**2``, which is sign-free.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = (complex(x) for x in (a, b, c, d))
        det = a * d - b * c
        if abs(det) < 1e-300 or not np.isfinite(det):
            raise DegenerateInputError("Möbius matrix is singular")
        s = cmath.sqrt(det)
        self.a, self.b, self.c, self.d = a / s, b / s, c / s, d / s

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def rotation(cls, angle: float):
        """The SU(2) matrix ``[[cos, -sin], [sin, cos]]`` of half-angle ``angle``."""
        c, s = np.cos(angle), np.sin(angle)
        return cls(c, -s, s, c)

    @classmethod
    def translation(cls, shift):
        return cls(1, shift, 0, 1)

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0):
        while True:
            m = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
            if abs(np.linalg.det(m)) > 0.1 * scale ** 2:
                return cls.from_matrix(m)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def trace_squared(self) -> complex:
        return (self.a + self.d) ** 2

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def power(self, k: int) -> "MobiusMap":
        return MobiusMap.from_matrix(np.linalg.matrix_power(self.matrix, k))

    def conjugate_by(self, p: "MobiusMap") -> "MobiusMap":
        """``p^-1 self p``."""
        return p.inverse() @ self @ p

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        inf = is_infinite(z)
        zz = np.where(inf, 0.0, z)
        num = self.a * zz + self.b
        den = self.c * zz + self.d
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, INF, num / np.where(den == 0, 1.0, den))
        at_inf = INF if self.c == 0 else self.a / self.c
        out = np.where(inf, at_inf, out)
        return out if out.ndim else complex(out)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return 1.0 / (self.c * z + self.d) ** 2

    def fixed_points(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if abs(c) < 1e-300:
            if abs(a - d) < 1e-300:
                return [INF]
            return [b / (d - a), INF]
        disc = cmath.sqrt((a - d) ** 2 + 4 * b * c)
        return [(a - d + disc) / (2 * c), (a - d - disc) / (2 * c)]

    def as_series(self, center=0.0, order=None) -> LaurentSeries:
        """Taylor expansion about ``center`` (which must not be the pole)."""
        z = LaurentSeries.monomial(1, center=center) + LaurentSeries.constant(center, center)
        num = self.a * z + self.b
        den = self.c * z + self.d
        if den.is_zero or abs(den.coefficient(0)) < 1e-300:
            raise DegenerateInputError("expansion point is the pole of the Möbius map")
        return num * den.reciprocal(order=order)

    def distance(self, other: "MobiusMap") -> float:
        """Max-entry distance, minimized over the sign ambiguity of PSL(2, C)."""
        m, n = self.matrix, other.matrix
        return float(min(np.max(np.abs(m - n)), np.max(np.abs(m + n))))

    def __repr__(self):
        return f"MobiusMap({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"
