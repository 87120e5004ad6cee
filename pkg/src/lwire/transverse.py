"""Spectral data of the 1D transverse operator h = -d²/dx² - α·δ(x) + V₀·1_{x>0}.

A step potential of height V₀ on the right half-line combined with an
attractive δ-well of strength α at the origin.  Closed forms:

  * continuum edge of h itself: 0
  * for V₀ < α² ("subcritical") a unique bound state at
        E = -((α² - V₀) / 2α)²
    decaying like e^{κ₋ x} on x < 0 and e^{-κ₊ x} on x > 0 with
        κ₋ = √(-E),  κ₊ = √(V₀ - E),  κ₋ + κ₊ = α   (δ jump condition)
  * for V₀ = α² ("critical") no L² eigenstate, but a bounded zero-energy
    solution: 1 on x < 0, e^{-√V₀ x} on x > 0
  * for V₀ > α² ("supercritical") no bound state at all.

The same quantity E doubles as the essential-spectrum threshold μ of the
2D bent-wire operator, which is why this module is the reference point for
everything else in the package.  A finite-difference discretization of h
is included as an independent numerical check on the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "PhysicsParams",
    "Regime",
    "TransverseSpectrum",
    "Grid1D",
    "RegimeError",
    "classify_regime",
    "essential_threshold",
    "transverse_bound_state",
    "generalized_zero_mode",
    "bound_state_grid",
    "solve_transverse_fd",
    "verify_halfline_inequality",
]

#: relative tolerance deciding when v0 counts as exactly critical
CRITICAL_RTOL = 1e-12


class RegimeError(ValueError):
    """Operation called outside its coupling regime."""


@dataclass(frozen=True)
class PhysicsParams:
    """Coupling strength alpha (1/length) and bias height v0 (1/length²)."""

    alpha: float
    v0: float

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.v0 >= 0):
            raise ValueError(f"v0 must be >= 0, got {self.v0}")


class Regime(Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class TransverseSpectrum:
    """Bound-state data of h; the kappa fields are the two decay rates."""

    threshold_mu: float  # continuum edge of h itself, always 0
    bound_energy: float | None
    kappa_minus: float | None
    kappa_plus: float | None


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid with Dirichlet ends and a node exactly at x = 0."""

    x_min: float
    x_max: float
    h: float
    n: int

    def __post_init__(self):
        if not (self.h > 0):
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if not (self.x_min < 0 < self.x_max):
            raise ValueError("grid must straddle x = 0")
        if self.n != round((self.x_max - self.x_min) / self.h) + 1:
            raise ValueError("node count inconsistent with spacing")
        if abs(self.x_min / self.h - round(self.x_min / self.h)) > 1e-9:
            raise ValueError("no grid node lies at x = 0")

    @classmethod
    def spanning(cls, x_min: float, x_max: float, h: float) -> "Grid1D":
        """Build a grid over [x_min, x_max], snapping the ends onto the h-lattice."""
        lo = math.floor(x_min / h)
        hi = math.ceil(x_max / h)
        return cls(lo * h, hi * h, h, hi - lo + 1)

    def nodes(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n)


def classify_regime(p: PhysicsParams) -> Regime:
    """Compare v0 against alpha², treating a 1e-12 relative band as critical."""
    a2 = p.alpha**2
    if abs(p.v0 - a2) <= CRITICAL_RTOL * a2:
        return Regime.CRITICAL
    return Regime.SUBCRITICAL if p.v0 < a2 else Regime.SUPERCRITICAL


def essential_threshold(p: PhysicsParams) -> float:
    """Edge mu of the 2D essential spectrum: -((α²-V₀)/2α)² below criticality, else 0."""
    a2 = p.alpha**2
    if p.v0 >= a2:
        return 0.0
    return -((a2 - p.v0) / (2.0 * p.alpha)) ** 2


def transverse_bound_state(p: PhysicsParams) -> TransverseSpectrum:
    """Bound state of h, present exactly in the subcritical regime."""
    if classify_regime(p) is not Regime.SUBCRITICAL:
        return TransverseSpectrum(0.0, None, None, None)
    energy = -(((p.alpha**2 - p.v0) / (2.0 * p.alpha)) ** 2)
    kappa_minus = math.sqrt(-energy)
    kappa_plus = math.sqrt(p.v0 - energy)
    return TransverseSpectrum(0.0, energy, kappa_minus, kappa_plus)


def generalized_zero_mode(p: PhysicsParams, x: float) -> float:
    """Bounded zero-energy solution of the critical operator: 1 left, e^{-√V₀ x} right."""
    if classify_regime(p) is not Regime.CRITICAL:
        raise RegimeError("zero mode exists only at v0 = alpha^2")
    if x <= 0:
        return 1.0
    return math.exp(-math.sqrt(p.v0) * x)


def bound_state_grid(p: PhysicsParams, h: float) -> Grid1D:
    """Grid whose Dirichlet ends sit at 40 decay lengths of the slowest tail.

    Truncation error for the subcritical bound state is then ~e^{-80},
    far below discretization error.  In the critical/supercritical regimes,
    where there is nothing to resolve, a fixed 40/alpha box is used.
    """
    spec = transverse_bound_state(p)
    if spec.bound_energy is not None:
        kappa_min = min(spec.kappa_minus, spec.kappa_plus)
    else:
        kappa_min = p.alpha
    half = 40.0 / kappa_min
    return Grid1D.spanning(-half, half, h)


def solve_transverse_fd(p: PhysicsParams, g: Grid1D, k: int = 4) -> np.ndarray:
    """Lowest k eigenvalues of the three-point discretization of h.

    Standard tridiagonal Laplacian with Dirichlet ends; +v0 on the diagonal
    at nodes with x > 0; the δ-well lumped as -alpha/h on the x = 0 node.
    Returned ascending.
    """
    x = g.nodes()[1:-1]  # interior nodes only, Dirichlet ends
    if x.size < k:
        raise ValueError("grid too small for requested eigenvalue count")
    h = g.h
    diag = np.full(x.size, 2.0 / h**2)
    diag += np.where(x > 0, p.v0, 0.0)
    i0 = int(np.argmin(np.abs(x)))
    if abs(x[i0]) > 1e-9 * h:
        raise ValueError("no interior node at x = 0")
    diag[i0] -= p.alpha / h
    off = np.full(x.size - 1, -1.0 / h**2)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1),
                            eigvals_only=True)
    return np.sort(vals)


def verify_halfline_inequality(x: np.ndarray, phi: np.ndarray, v0: float) -> float:
    """Slack of the half-line bound ∫(|φ'|² + V₀φ²) ≥ √V₀·φ(0)² on tabulated samples.

    Composite trapezoid for the integral, central differences for φ'.
    Inputs must start at x = 0 and decay to a negligible tail at the far end.
    Non-negative (up to quadrature error) for every admissible φ; zero is
    attained exactly on φ(x) = φ(0)·e^{-√V₀ x}.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if x.size == 0 or phi.size == 0:
        raise ValueError("empty sample set")
    if x.size != phi.size:
        raise ValueError("x and phi must have matching lengths")
    if v0 <= 0:
        raise ValueError("the inequality needs v0 > 0")
    dphi = np.gradient(phi, x)
    integral = np.trapezoid(dphi**2 + v0 * phi**2, x)
    return float(integral - math.sqrt(v0) * phi[0] ** 2)
