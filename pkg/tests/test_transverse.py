"""Transverse operator: closed forms against the finite-difference oracle."""

import math

import numpy as np
import pytest

from lwire.transverse import (CRITICAL_RTOL, Grid1D, PhysicsParams, Regime,
                              RegimeError, bound_state_grid, classify_regime,
                              essential_threshold, generalized_zero_mode,
                              solve_transverse_fd, transverse_bound_state,
                              verify_halfline_inequality)


def test_params_validation():
    with pytest.raises(ValueError):
        PhysicsParams(0.0, 1.0)
    with pytest.raises(ValueError):
        PhysicsParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        PhysicsParams(1.0, -0.1)


def test_classify_regime():
    assert classify_regime(PhysicsParams(1, 0.5)) is Regime.SUBCRITICAL
    assert classify_regime(PhysicsParams(1, 1.0)) is Regime.CRITICAL
    assert classify_regime(PhysicsParams(1, 4.0)) is Regime.SUPERCRITICAL
    # the critical band is relative
    assert classify_regime(PhysicsParams(3, 9 * (1 + 0.5 * CRITICAL_RTOL))) \
        is Regime.CRITICAL


def test_essential_threshold_values():
    assert essential_threshold(PhysicsParams(1, 0)) == -0.25
    assert essential_threshold(PhysicsParams(1, 0.5)) == -0.0625
    assert essential_threshold(PhysicsParams(1, 1)) == 0.0
    assert essential_threshold(PhysicsParams(1, 4)) == 0.0


def test_threshold_zero_above_criticality_and_continuous():
    rng = np.random.default_rng(0)
    for v0 in rng.uniform(1.0, 10.0, 100):
        assert essential_threshold(PhysicsParams(1.0, v0)) == 0.0
    # continuity across the critical point
    eps = 1e-8
    below = essential_threshold(PhysicsParams(1.0, 1.0 - eps))
    assert abs(below) < 1e-15


def test_bound_state_standard_well():
    spec = transverse_bound_state(PhysicsParams(2, 0))
    assert spec.bound_energy == -1.0
    assert spec.kappa_minus == 1.0
    assert spec.kappa_plus == 1.0


def test_bound_state_biased():
    spec = transverse_bound_state(PhysicsParams(1, 0.5))
    assert spec.bound_energy == -0.0625
    assert spec.kappa_minus == 0.25
    assert spec.kappa_plus == 0.75
    assert spec.kappa_minus + spec.kappa_plus == 1.0


def test_bound_state_absent_at_and_above_critical():
    for v0 in (1.0, 2.0, 4.0):
        spec = transverse_bound_state(PhysicsParams(1, v0))
        assert spec.bound_energy is None
        assert spec.kappa_minus is None


def test_kappa_sum_identity_random_sweep():
    rng = np.random.default_rng(42)
    for _ in range(200):
        alpha = rng.uniform(0.1, 5.0)
        v0 = rng.uniform(0.0, 0.999) * alpha**2
        spec = transverse_bound_state(PhysicsParams(alpha, v0))
        assert abs(spec.kappa_minus + spec.kappa_plus - alpha) <= 1e-12 * alpha
    # threshold edge equals the 1D bound energy below criticality
    for _ in range(50):
        alpha = rng.uniform(0.1, 5.0)
        v0 = rng.uniform(0.0, 0.999) * alpha**2
        p = PhysicsParams(alpha, v0)
        assert essential_threshold(p) == transverse_bound_state(p).bound_energy


def test_zero_mode_values():
    p = PhysicsParams(1, 1)
    assert generalized_zero_mode(p, -5.0) == 1.0
    assert generalized_zero_mode(p, 0.0) == 1.0
    assert math.isclose(generalized_zero_mode(p, 1.0), math.exp(-1.0),
                        rel_tol=1e-15)


def test_zero_mode_regime_guard():
    with pytest.raises(RegimeError):
        generalized_zero_mode(PhysicsParams(1, 0.5), 1.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(-1.0, 1.0, -0.1, 21)
    with pytest.raises(ValueError):
        Grid1D(1.0, 2.0, 0.1, 11)  # does not straddle zero
    with pytest.raises(ValueError):
        Grid1D(-1.05, 1.0, 0.1, 22)  # no node at zero
    g = Grid1D.spanning(-1.0, 1.0, 0.1)
    assert g.n == 21
    assert np.isclose(g.nodes(), 0.0).any()


def test_fd_rejects_tiny_grid():
    g = Grid1D.spanning(-0.2, 0.2, 0.1)
    with pytest.raises(ValueError):
        solve_transverse_fd(PhysicsParams(1, 0), g, k=10)


def test_fd_matches_closed_form_standard_well():
    p = PhysicsParams(2, 0)
    g = Grid1D.spanning(-40, 40, 0.01)
    vals = solve_transverse_fd(p, g, k=1)
    assert abs(vals[0] - (-1.0)) < 1e-3


def test_fd_matches_closed_form_biased():
    p = PhysicsParams(1, 0.5)
    g = Grid1D.spanning(-80, 80, 0.01)
    vals = solve_transverse_fd(p, g, k=1)
    assert abs(vals[0] - (-0.0625)) < 1e-3


def test_fd_critical_no_negative_state():
    p = PhysicsParams(1, 1)
    for half in (80, 160):  # doubling the domain: no negative state appears
        g = Grid1D.spanning(-half, half, 0.01)
        vals = solve_transverse_fd(p, g, k=1)
        assert vals[0] >= -1e-2


def test_fd_convergence_order():
    p = PhysicsParams(1, 0.5)
    exact = -0.0625
    errs = []
    hs = [0.04, 0.02, 0.01]
    for h in hs:
        g = bound_state_grid(p, h)
        errs.append(abs(solve_transverse_fd(p, g, k=1)[0] - exact))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 1.0


def test_halfline_inequality_minimizer_and_zero():
    x = np.linspace(0, 25, 4001)
    slack = verify_halfline_inequality(x, np.exp(-x), 1.0)
    assert abs(slack) < 1e-4  # Euler minimizer: equality up to quadrature error
    assert verify_halfline_inequality(x, np.zeros_like(x), 1.0) == 0.0


def test_halfline_inequality_analytic_slack():
    x = np.linspace(0, 25, 40001)
    slack = verify_halfline_inequality(x, np.exp(-2 * x), 1.0)
    assert abs(slack - 0.25) < 1e-4


def test_halfline_inequality_empty_rejected():
    with pytest.raises(ValueError):
        verify_halfline_inequality(np.array([]), np.array([]), 1.0)


def test_halfline_inequality_randomized_property():
    # 1000 random decaying C1 tabulations: slack never meaningfully negative
    rng = np.random.default_rng(7)
    x = np.linspace(0, 30, 3001)
    worst = np.inf
    for _ in range(1000):
        v0 = rng.uniform(0.2, 4.0)
        k = rng.uniform(0.3, 3.0) * math.sqrt(v0)
        a, b, c = rng.uniform(-1, 1, 3)
        phi = (a + b * np.cos(rng.uniform(0.1, 2.0) * x)
               + c * x / (1 + x)) * np.exp(-k * x)
        slack = verify_halfline_inequality(x, phi, v0)
        worst = min(worst, slack)
    assert worst >= -1e-8
