"""Numerical laboratory for singular projective structures on a punctured disc."""
from .config import DEFAULTS, Tolerances
from .errors import (AmbiguousClassification, DegenerateInputError, InconsistentJumpError,
                     InputError, LabError, NumericalFailure, SeriesDivisionError, StructureError)
from .mobius import MobiusMap
from .series import LaurentSeries, coefficients_from_samples, sample_circle
from .schwarzian import (QuadraticDifferential, orbifold_lift, orbifold_pushdown, pullback,
                         ramified_lift, schwarzian, schwarzian_from_derivative, verify_cocycle)
from .developing import FunctionMap, LogDevelopingMap, PowerDevelopingMap
from .ode import (FundamentalPair, PathSpec, XiField, continue_along_path, developing_quotient,
                  local_solution_basis, variation_of_parameters)
from .monodromy import (classify, elliptic_order, log_decompose, parabolic_translation,
                        puncture_monodromy, residue_check)
from .probes import (AnnulusSector, SlitDisc, accumulation_probe, koebe_witness,
                     power_form_probe, probe_injectivity)
from .norms import (CoveringChart, euclidean_area_norm, hyperbolic_sup_norm, norm_report,
                    relative_xi, schlicht_thresholds)
from .pipeline import ProblemSpec, export_samples, run_pipeline

__version__ = "0.1.0"
