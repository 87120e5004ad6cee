"""Orchestration: solve/sweep/converge/certify runs over experiment configs.

Every entry point takes an ExperimentConfig and returns plain result
objects; persistence (text records, CSV rows) is layered on top so that
parallel sweep workers only pass values back to the single writer in the
parent process.
"""

from __future__ import annotations

import concurrent.futures
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .assembly import Grid2D, assemble_hamiltonian, export_matrix
from .config import ConfigError, ExperimentConfig
from .eigensolve import Verdict, discrete_spectrum_scan
from .geometry import BiasOrientation, CurveKind
from .records import ResultRecord, append_csv, write_record
from .transverse import (PhysicsParams, Regime, bound_state_grid,
                         classify_regime, essential_threshold,
                         solve_transverse_fd, transverse_bound_state)
from .variational import (ProductTrial, QuadratureSpec, evaluate_form,
                          fillet_critical_certificate,
                          ground_state_persistence_certificate,
                          product_trial_condition, wedge_critical_certificate)

__all__ = [
    "default_jobs", "transverse_table", "run_solve", "run_sweep",
    "ConvergenceReport", "run_converge", "run_certify", "richardson_1d",
]


def default_jobs() -> int:
    env = os.environ.get("LWIRE_JOBS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


# -- transverse table ---------------------------------------------------------

def richardson_1d(p: PhysicsParams, hs=(0.02, 0.01, 0.005)) -> float:
    """FD ground state extrapolated in h, cancelling the O(h) and O(h²) terms.

    The interface sampling carries a clean O(h) error and the stencil an
    O(h²) one; one first-order and one second-order elimination removes
    both (the three spacings must halve).
    """
    es = [solve_transverse_fd(p, bound_state_grid(p, h), k=1)[0] for h in hs]
    f1 = 2 * es[1] - es[0]
    f2 = 2 * es[2] - es[1]
    return (4 * f2 - f1) / 3


def transverse_table(alpha: float, v0: float) -> str:
    p = PhysicsParams(alpha, v0)
    regime = classify_regime(p)
    mu = essential_threshold(p)
    spec = transverse_bound_state(p)
    lines = [
        f"alpha            = {alpha!r}",
        f"v0               = {v0!r}",
        f"regime           = {regime.value}",
        f"threshold mu     = {mu!r}",
    ]
    if spec.bound_energy is not None:
        lines += [
            f"bound energy     = {spec.bound_energy!r}",
            f"kappa_minus      = {spec.kappa_minus!r}",
            f"kappa_plus       = {spec.kappa_plus!r}",
            f"kappa sum (=alpha) = {spec.kappa_minus + spec.kappa_plus!r}",
        ]
        fd = richardson_1d(p)
        lines += [
            f"fd cross-check   = {fd!r}",
            f"fd rel error     = {abs(fd - mu) / abs(mu):.3e}",
        ]
    else:
        lines.append("bound state      = none (v0 >= alpha^2)")
        g = bound_state_grid(p, 0.01)
        fd = solve_transverse_fd(p, g, k=1)[0]
        lines.append(f"fd lowest        = {fd!r} (continuum edge at 0)")
    return "\n".join(lines)


# -- solve ---------------------------------------------------------------------

def _cheap_certificate(cfg: ExperimentConfig) -> tuple[str, str]:
    """Discretization-free certificate appropriate for the configuration.

    Critical/supercritical interior bias: corner/fillet log-cutoff trial.
    Subcritical interior bias: the closed-form separable-trial condition.
    Everything else: not applicable ('-').
    """
    p = cfg.physics()
    c = cfg.curve()
    if cfg.bias() is not BiasOrientation.INTERIOR:
        return "-", ""
    try:
        if p.v0 >= p.alpha**2 * (1 - 1e-12):
            fn = (wedge_critical_certificate if c.kind is CurveKind.WEDGE
                  else fillet_critical_certificate)
            hit = fn(p, c)
            if hit is None:
                return "none", ""
            a, b, fb = hit
            return "found", f"log-cutoff a={a!r} b={b!r} total={fb.total!r}"
        lhs, holds = product_trial_condition(p.alpha, p.v0, c.beta,
                                             100.0 / p.alpha, 1)
        return ("found" if holds else "none"), f"product-condition lhs={lhs!r}"
    except (ValueError, RuntimeError) as exc:
        return "none", f"certificate error: {exc}"


def run_solve(cfg: ExperimentConfig, with_certificate: bool = True,
              export_path=None) -> ResultRecord:
    t0 = time.time()
    outcome = discrete_spectrum_scan(
        cfg.physics(), cfg.curve(), cfg.bias(), cfg.ladder,
        margin=cfg.margin, delta_mode=cfg.mode(), origin_offset=cfg.offset,
        seed=cfg.seed, tol_resid=cfg.tol_resid)
    cert, detail = _cheap_certificate(cfg) if with_certificate else ("-", "")
    if export_path is not None:
        h, R = cfg.ladder[-1]
        op = assemble_hamiltonian(cfg.physics(), cfg.curve(), cfg.bias(),
                                  Grid2D.build(R, h, cfg.offset), cfg.mode())
        export_matrix(op, export_path)
    return ResultRecord.from_scan(cfg, outcome, cert, detail,
                                  wall_total=time.time() - t0)


def persist(rec: ResultRecord, out_base) -> None:
    """Write <base>.result.txt and append to <base>.csv."""
    write_record(rec, str(out_base) + ".result.txt")
    append_csv(rec, str(out_base) + ".csv")


# -- sweep ---------------------------------------------------------------------

def _sweep_point(args):
    cfg, axis, value = args
    try:
        point = cfg.with_axis_value(axis, value).validate()
        return value, run_solve(point), None
    except Exception as exc:  # per-point failures recorded, sweep continues
        return value, None, f"{type(exc).__name__}: {exc}"


def run_sweep(cfg: ExperimentConfig, axis: str, values, jobs: int | None = None):
    """Solve one config per axis value; results in input order.

    Returns a list of (value, ResultRecord | None, error | None).
    """
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    jobs = jobs if jobs else default_jobs()
    tasks = [(cfg, axis, v) for v in values]
    if jobs == 1:
        return [_sweep_point(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, tasks))


# -- convergence study -----------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    rungs: tuple[tuple[float, float, float], ...]  # (h, R, lambda_min)
    observed_order: float
    extrapolated: float
    r_gap: float
    inconclusive: bool

    def table(self) -> str:
        lines = ["      h        R      lambda_min"]
        for h, R, lam in self.rungs:
            lines.append(f"{h:9.4f} {R:8.3f}  {lam!r}")
        lines += [
            f"observed order in h   = {self.observed_order:.3f}",
            f"extrapolated lambda_1 = {self.extrapolated!r}",
            f"R-stability gap       = {self.r_gap:.3e}",
            f"status                = "
            f"{'inconclusive (order < 0.7)' if self.inconclusive else 'converged'}",
        ]
        return "\n".join(lines)


def run_converge(cfg: ExperimentConfig, seed: int | None = None) -> ConvergenceReport:
    """Observed h-order at fixed R, plus box-size stability.

    The ladder must contain at least three successively halved spacings at
    one fixed R, and at least two distinct R values.
    """
    from .eigensolve import lowest_eigenvalues

    seed = cfg.seed if seed is None else seed
    by_R: dict[float, list[tuple[float, float]]] = {}
    rows = []
    for h, R in cfg.ladder:
        op = assemble_hamiltonian(cfg.physics(), cfg.curve(), cfg.bias(),
                                  Grid2D.build(R, h, cfg.offset), cfg.mode())
        (lam, _), = lowest_eigenvalues(op, 1, cfg.tol_resid, seed)
        rows.append((h, R, lam))
        by_R.setdefault(R, []).append((h, lam))
    hs_at = {R: sorted(v, reverse=True) for R, v in by_R.items()}
    study = next((v for v in hs_at.values() if len(v) >= 3), None)
    if study is None:
        raise ConfigError("converge needs >= 3 h-rungs at one fixed R")
    if len(by_R) < 2:
        raise ConfigError("converge needs >= 2 distinct R values")
    (h0, e0), (h1, e1), (h2, e2) = study[:3]
    if not (abs(h0 / h1 - 2) < 1e-9 and abs(h1 / h2 - 2) < 1e-9):
        raise ConfigError("h-rungs must halve for the order estimate")
    d0, d1 = e0 - e1, e1 - e2
    order = math.log2(abs(d0 / d1)) if d1 != 0 else math.inf
    extrap = e2 + d1 / (2**order - 1) if math.isfinite(order) and order > 0 else e2
    finest_h = min(h for h, _ in study)
    lam_by_R = {R: dict(v).get(finest_h) for R, v in by_R.items()}
    lam_R = [(R, lam) for R, lam in sorted(lam_by_R.items()) if lam is not None]
    r_gap = abs(lam_R[-1][1] - lam_R[-2][1]) if len(lam_R) >= 2 else math.nan
    return ConvergenceReport(tuple(rows), order, extrap, r_gap,
                             inconclusive=not (order >= 0.7))


# -- certify ---------------------------------------------------------------------

def run_certify(cfg: ExperimentConfig, family: str,
                length: float | None = None, mode: int = 1):
    """Run the requested certificate search; returns (found, detail_text)."""
    p = cfg.physics()
    c = cfg.curve()
    if family == "log-cutoff":
        if cfg.bias() is not BiasOrientation.INTERIOR:
            raise ConfigError("the log-cutoff certificate applies to interior bias")
        fn = (wedge_critical_certificate if c.kind is CurveKind.WEDGE
              else fillet_critical_certificate)
        try:
            hit = fn(p, c, quad=QuadratureSpec())
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if hit is None:
            return False, "no (a, b) on the search grid gave a negative total"
        a, b, fb = hit
        return True, (f"a = {a!r}\nb = {b!r}\nkinetic = {fb.kinetic!r}\n"
                      f"potential = {fb.potential!r}\nline_term = {fb.line_term!r}\n"
                      f"norm_sq = {fb.norm_sq!r}\ntotal = {fb.total!r}\n"
                      f"refine_gap = {fb.refine_gap:.2e}")
    if family == "product":
        L = length if length is not None else 100.0 / p.alpha
        try:
            lhs, holds = product_trial_condition(p.alpha, p.v0, c.beta, L, mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        fb = evaluate_form(ProductTrial(L, mode), p, c, cfg.bias())
        quot = fb.total / fb.norm_sq
        mu = essential_threshold(p)
        return holds, (f"length = {L!r}\nmode = {mode}\nlhs = {lhs!r}\n"
                       f"holds = {holds}\nrayleigh_quotient = {quot!r}\n"
                       f"mu = {mu!r}")
    if family == "persistence":
        if cfg.bias() is not BiasOrientation.EXTERIOR:
            raise ConfigError("the persistence certificate applies to exterior bias")
        if classify_regime(p) is not Regime.SUBCRITICAL:
            raise ConfigError("the persistence certificate needs v0 < alpha^2")
        cert = ground_state_persistence_certificate(p, c)
        return cert.certified, (
            f"lambda0 = {cert.lambda0!r}\nbiased_quotient = {cert.quotient!r}\n"
            f"mu = {cert.mu!r}\nvc_estimate = {cert.vc_estimate!r}\n"
            f"grid h = {cert.grid_h!r}, R = {cert.grid_R!r}")
    raise ConfigError(f"unknown certificate family {family!r}; "
                      "choose log-cutoff, product, or persistence")
