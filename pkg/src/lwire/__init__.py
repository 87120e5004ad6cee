"""Bound states of a 2D Schrödinger operator with an attractive δ-line on a
bent curve and a one-sided constant potential bias.

Numerical toolkit: closed-form transverse spectral data, sparse
finite-difference discretization on truncated boxes, certified eigenvalue
and inertia computations, discretization-free variational certificates,
and a reproducible experiment harness.
"""

__version__ = "0.1.0"

from .transverse import (PhysicsParams, Regime, TransverseSpectrum,
                         classify_regime, essential_threshold,
                         transverse_bound_state)
from .geometry import (BiasOrientation, CurveKind, CurveSpec, RegionLabel,
                       classify_region, distance_to_curve, point_at)
from .assembly import (CELL_LUMPING, DeltaMode, DiscreteOperator, Grid2D,
                       assemble_hamiltonian, potential_field)
from .eigensolve import (ScanOutcome, SpectralResult, Verdict, count_below,
                         discrete_spectrum_scan, lowest_eigenvalues)
from .variational import (FormBreakdown, LogCutoffTrial, ProductTrial,
                          evaluate_form, fillet_critical_certificate,
                          ground_state_persistence_certificate,
                          product_trial_condition,
                          wedge_critical_certificate)

__all__ = [
    "__version__",
    "PhysicsParams", "Regime", "TransverseSpectrum", "classify_regime",
    "essential_threshold", "transverse_bound_state",
    "BiasOrientation", "CurveKind", "CurveSpec", "RegionLabel",
    "classify_region", "distance_to_curve", "point_at",
    "CELL_LUMPING", "DeltaMode", "DiscreteOperator", "Grid2D",
    "assemble_hamiltonian", "potential_field",
    "ScanOutcome", "SpectralResult", "Verdict", "count_below",
    "discrete_spectrum_scan", "lowest_eigenvalues",
    "FormBreakdown", "LogCutoffTrial", "ProductTrial", "evaluate_form",
    "fillet_critical_certificate", "ground_state_persistence_certificate",
    "product_trial_condition", "wedge_critical_certificate",
]
