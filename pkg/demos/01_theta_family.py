"""Local monodromy of xi = (1 - theta^2) / (2 z^2) around the puncture.

Trace^2 of the monodromy equals 4 cos^2(pi theta); the class moves from
elliptic (real theta) through parabolic (theta = 0) to hyperbolic (theta = i).
"""
import numpy as np

from schwarzian_lab import LaurentSeries, puncture_monodromy

for theta in (1 / 2, 1 / 3, 1 / 7, 0.3 + 0.1j, 0.0, 1j):
    xi = LaurentSeries.monomial(-2, (1 - theta ** 2) / 2)
    rep = puncture_monodromy(xi, 0.5)
    print(f"theta={theta!s:>12}  trace^2={rep.trace_squared:.10f}  "
          f"4cos^2(pi theta)={4 * np.cos(np.pi * theta) ** 2:.10f}  {rep.label}")
