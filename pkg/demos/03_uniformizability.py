"""Probes that separate uniformizable punctures from obstructed ones.

A developing map coming from a uniformization has a limit at the puncture
along thin sectors; an essential singularity does not.  A pole of order >= 2
in g forces two points of a slit disc to share an image (non-injectivity).
"""
import numpy as np

from schwarzian_lab import (FunctionMap, LaurentSeries, LogDevelopingMap, PowerDevelopingMap,
                            accumulation_probe, koebe_witness)

cases = {
    "z": FunctionMap(lambda z: z),
    "z^(1/3)": PowerDevelopingMap(1.0, 1 / 3),
    "1/z + ln z": LogDevelopingMap(LaurentSeries.monomial(-1), 2j * np.pi),
    "sin(1/z)": FunctionMap(lambda z: np.sin(1 / z)),
}
for name, dev in cases.items():
    # z^theta shrinks like 2^(-theta j), so let the depth adapt
    v = accumulation_probe(dev, max_depth=160)
    print(f"{name:>11}: {v.outcome:6s} depth {v.resolution['depth']:3d} spread {v.spread:.2e}")

for k0 in (-2, -3):
    w = koebe_witness(LaurentSeries.monomial(k0), 2j * np.pi)
    print(f"g = z^{k0}: collision at z1={w.z1:.4f}, z2={w.z2:.4f}, |f(z1)-f(z2)|={w.image_distance:.1e}")
