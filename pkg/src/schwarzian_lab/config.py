"""Default numeric gates.

Every tolerance used by the library lives here so that a problem spec can
override it in one place (see :func:`Tolerances.updated`).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

SERIES_ORDER = 32
ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True)
class Tolerances:
    series_order: int = SERIES_ORDER
    zero_threshold: float = ZERO_THRESHOLD
    continuation_order: int = 24
    continuation_tol: float = 1e-10
    min_step: float = 1e-12
    exclusion_margin: float = 1e-9
    classification_band: float = 1e-6
    imag_tol: float = 1e-8
    identity_tol: float = 1e-6
    order_tol: float = 1e-8
    k_max: int = 10_000
    a_minus1_threshold: float = 1e-10
    single_valued_tol: float = 1e-8
    residue_tol: float = 1e-8
    probe_grid: int = 128
    probe_depth: int = 20
    limit_tol: float = 1e-3
    norm_grid: int = 256

    def updated(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        names = {f.name for f in dataclasses.fields(self)}
        unknown = set(overrides) - names
        if unknown:
            from .errors import InputError

            raise InputError(f"unknown tolerance keys: {sorted(unknown)}")
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULTS = Tolerances()
