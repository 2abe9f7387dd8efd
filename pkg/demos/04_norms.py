"""Size of quadratic differentials near the puncture.

Hyperbolic sup norm on the disc, Euclidean L1 on the punctured disc, and the
cusp-relative sup norm that subtracts the model 1/(2 z^2).
"""
from schwarzian_lab import (LaurentSeries, euclidean_area_norm, hyperbolic_sup_norm,
                            relative_xi)

print("L_inf of constant 2 on the disc:", hyperbolic_sup_norm(2.0, "disc").value)
l1 = euclidean_area_norm(LaurentSeries.monomial(-1))
print("L1 of 1/z:", l1.value_at_eps, "limit", l1.limit)
div = euclidean_area_norm(LaurentSeries.monomial(-2))
print("L1 of 1/z^2: convergent =", div.convergent, "growth =", div.growth)
cusp = LaurentSeries.monomial(-2, 0.5) + LaurentSeries.monomial(-1, 3.0)
print("cusp-relative L_inf of 1/(2z^2) + 3/z:",
      hyperbolic_sup_norm(relative_xi(cusp, "punctured_disc"), "punctured_disc").value)
