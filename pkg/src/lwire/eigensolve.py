"""Certified low-lying eigenvalues and exact below-threshold counts.

Two independent routes into the spectrum of the assembled operator:

  * shift-invert Lanczos for the lowest eigenvalues, with residuals
    recomputed from scratch after the solve (never trusted from ARPACK);
  * exact eigenvalue counting below a shift via the inertia of a
    symmetric-indefinite factorization of A - σI (no iterative error:
    the count is a property of the factorization's pivot signs).

On top of these, ``discrete_spectrum_scan`` runs a ladder of grids and
turns the raw numbers into an Exists / Absent / Inconclusive verdict for
"is there spectrum below the continuum edge mu".  Dirichlet truncation
only pushes eigenvalues up, so a value safely below mu on a finite box is
conservative evidence of a genuine bound state; the margin term guards
against discretization bias and against mistaking truncated-continuum box
modes (which cluster at positive (π/2R)²-scale values above mu) for
discrete eigenvalues.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import (CELL_LUMPING, DeltaMode, DiscreteOperator, Grid2D,
                       assemble_hamiltonian, gershgorin_bounds)
from .geometry import BiasOrientation, CurveSpec
from .transverse import PhysicsParams, essential_threshold

__all__ = [
    "ConvergenceError",
    "FactorizationError",
    "SolverStats",
    "SpectralResult",
    "ScanOutcome",
    "Verdict",
    "lowest_eigenvalues",
    "count_below",
    "scan_margin",
    "discrete_spectrum_scan",
    "INERTIA_DOF_LIMIT",
]

#: above this many unknowns the per-rung inertia count is skipped and the
#: eigenvalue request size is carried over from the previous rung
INERTIA_DOF_LIMIT = 600_000


class ConvergenceError(RuntimeError):
    """Iterative eigensolve failed; ``best`` holds the best iterate found."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class FactorizationError(RuntimeError):
    """Symmetric-indefinite factorization broke down repeatedly."""


def _as_matrix(A) -> sp.csr_matrix:
    return A.matrix if isinstance(A, DiscreteOperator) else A


def lowest_eigenvalues(A, k: int, tol_resid: float = 1e-8,
                       seed: int = 0, sigma: float | None = None):
    """k smallest eigenvalues with independently certified residuals.

    Shift-invert Lanczos around a shift placed below the physical range of
    bound states; if eigenvalues below the shift show up, the shift is
    lowered and the solve repeated.  Deterministic for a fixed seed.
    Returns a list of (eigenvalue, residual) pairs, ascending.
    """
    M = _as_matrix(A)
    n = M.shape[0]
    if not (1 <= k < n):
        raise ValueError(f"need 1 <= k < dim, got k={k}, dim={n}")
    if not (0 < tol_resid <= 1e-4):
        raise ValueError("tol_resid must lie in (0, 1e-4]")
    if sigma is None:
        lo, _ = gershgorin_bounds(M)
        sigma = max(lo, -1.0) - 1.0  # just below the physical bound-state range
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    for _ in range(4):
        try:
            vals, vecs = spla.eigsh(M, k=k, sigma=sigma, which="LM", v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"eigensolve did not converge: {exc}",
                best=(exc.eigenvalues, exc.eigenvectors)) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals[0] > sigma:
            break
        sigma = vals[0] - 4.0 * (vals[-1] - vals[0] + 1.0)
    out = []
    for i in range(k):
        v = vecs[:, i]
        resid = float(np.linalg.norm(M @ v - vals[i] * v) / np.linalg.norm(v))
        if resid > tol_resid:
            raise ConvergenceError(
                f"residual {resid:.2e} above tol {tol_resid:.2e} "
                f"for eigenvalue {vals[i]:.6g}", best=(vals, vecs))
        out.append((float(vals[i]), resid))
    return out


def count_below(A, sigma: float, _shift_step: float = 1e-10) -> int:
    """Number of eigenvalues strictly below sigma, exact for the matrix.

    Inertia of A - σI from an LDLᵀ-style factorization: SuperLU in
    symmetric mode with diagonal pivoting only, so the signs of the U
    diagonal give the inertia (Sylvester's law).  On breakdown the shift
    is nudged by +1e-10 up to three times.
    """
    M = _as_matrix(A).tocsc()
    n = M.shape[0]
    last = None
    for attempt in range(3):
        s = sigma + attempt * _shift_step
        try:
            lu = spla.splu(M - s * sp.identity(n, format="csc"),
                           diag_pivot_thresh=0.0,
                           options=dict(SymmetricMode=True))
            d = lu.U.diagonal()
            if np.all(np.isfinite(d)) and np.all(d != 0):
                return int((d < 0).sum())
            last = "zero or non-finite pivot"
        except RuntimeError as exc:
            last = str(exc)
    raise FactorizationError(
        f"factorization failed after 3 shift perturbations: {last}")


@dataclass(frozen=True)
class SolverStats:
    seed: int
    requested: int
    residuals: tuple[float, ...]
    wall_time: float


@dataclass(frozen=True)
class SpectralResult:
    """Spectrum summary for one grid rung."""

    mu: float
    margin: float
    lambda_min: float
    eigenvalues_below: tuple[float, ...]  # those < mu - margin
    count_below_mu_margin: int
    count_exact: bool  # True if the count came from the inertia route
    solver_stats: SolverStats
    grid: Grid2D


class Verdict:
    EXISTS = "exists"
    ABSENT = "absent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ScanOutcome:
    verdict: str
    lambda1: float | None  # best estimate (finest rung) when EXISTS
    rungs: tuple[SpectralResult, ...]
    mu: float
    margin: float


def scan_margin(mu: float, half_extent: float) -> float:
    """Separation below mu required before a box eigenvalue counts as bound.

    max(2% of |mu|, 5·(π/2R)²): the second term dominates for critical
    configurations where mu = 0 and truncated-continuum box modes sit at
    (π/2R)²-scale positive values.
    """
    return max(0.02 * abs(mu), 5.0 * (math.pi / (2.0 * half_extent)) ** 2)


def _rung_result(p, c, o, g, mode, mu, margin, k, seed, tol_resid):
    t0 = time.time()
    op = assemble_hamiltonian(p, c, o, g, mode)
    exact = op.dim <= INERTIA_DOF_LIMIT
    if exact:
        cnt = count_below(op, mu - margin)
        k = max(k, cnt + 2)
    pairs = lowest_eigenvalues(op, min(k, op.dim - 1), tol_resid, seed)
    vals = [v for v, _ in pairs]
    below = tuple(v for v in vals if v < mu - margin)
    if not exact:
        cnt = len(below)
    stats = SolverStats(seed, len(pairs), tuple(r for _, r in pairs),
                        time.time() - t0)
    return SpectralResult(mu, margin, vals[0], below, cnt, exact, stats, g), k


def discrete_spectrum_scan(p: PhysicsParams, c: CurveSpec, o: BiasOrientation,
                           ladder, margin: float | None = None,
                           delta_mode: DeltaMode = CELL_LUMPING,
                           origin_offset=(0.0, 0.0), seed: int = 0,
                           tol_resid: float = 1e-8) -> ScanOutcome:
    """Run a grid ladder and classify the spectrum below mu.

    ``ladder`` is a sequence of (h, R) rungs with non-increasing h and
    non-decreasing R; the verdict margin is taken at the largest box,
    where truncation noise is smallest (smaller boxes only have to clear
    the same bar, which Dirichlet monotonicity makes harder, not easier).

      Exists        every rung has lambda_min < mu - margin and the two
                    largest boxes agree to tol_R = max(30% of the depth, 1e-3)
      Absent        the finest rung has lambda_min >= mu - margin
      Inconclusive  anything else
    """
    rungs = [(float(h), float(R)) for h, R in ladder]
    if len(rungs) < 2:
        raise ValueError("ladder needs at least two rungs")
    if any(h1 < h2 or R1 > R2 for (h1, R1), (h2, R2) in zip(rungs, rungs[1:])):
        raise ValueError("ladder must have non-increasing h and non-decreasing R")
    mu = essential_threshold(p)
    verdict_margin = scan_margin(mu, rungs[-1][1]) if margin is None else margin
    results = []
    k = 2
    for h, R in rungs:
        g = Grid2D.build(R, h, origin_offset)
        res, k = _rung_result(p, c, o, g, delta_mode, mu, verdict_margin,
                              k, seed, tol_resid)
        results.append(res)
    last = results[-1]
    if last.lambda_min >= mu - verdict_margin:
        verdict = Verdict.ABSENT
        lam = None
    elif all(r.lambda_min < mu - verdict_margin for r in results):
        # R-stability between the two largest boxes
        big = [r for r in results if r.grid.half_extent == last.grid.half_extent]
        prev = None
        for r in results:
            if r.grid.half_extent < last.grid.half_extent:
                prev = r
        ref = prev if prev is not None else (big[-2] if len(big) > 1 else None)
        depth = mu - last.lambda_min
        tol_r = max(0.3 * depth, 1e-3)
        if ref is None or abs(ref.lambda_min - last.lambda_min) < tol_r:
            verdict = Verdict.EXISTS
            lam = last.lambda_min
        else:
            verdict = Verdict.INCONCLUSIVE
            lam = None
    else:
        verdict = Verdict.INCONCLUSIVE
        lam = None
    return ScanOutcome(verdict, lam, tuple(results), mu, verdict_margin)
