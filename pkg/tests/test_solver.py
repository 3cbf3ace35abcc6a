import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varwave import (
    GridField,
    NonlinearitySpec,
    PeriodicSolver,
    SolveConfig,
    SpectralSpace,
    apply_L,
    clamp_radius,
    clamp_slope_g,
    continuation_solve,
    mode_field,
    multiply,
    project_parity,
    random_odd_field,
    resolvent_apply,
    spectral_residual,
    synthesize,
    uniqueness_probe,
)
from varwave._validation import ConvergenceError, HypothesisError, ResonanceError

SAT = NonlinearitySpec(c_lin=-0.25, c_sat=0.125)


@given(st.floats(-50, 50, allow_nan=False))
@settings(max_examples=60)
def test_clamp_slope_stays_in_bracket(y):
    R = clamp_radius(SAT, -1.15, 0.65)
    g = clamp_slope_g(SAT, -1.15, R, y)
    assert -1.15 - 1e-12 <= g <= 0.65 + 1e-12
    if abs(y) >= R:
        assert g * y == pytest.approx(float(SAT.value(np.array(y))), rel=1e-12, abs=1e-300)


def test_clamp_radius_is_minimal_for_oscillation():
    spec = NonlinearitySpec(c_lin=-0.25, c_osc=0.5)
    R = clamp_radius(spec, -1.15, 0.65)
    # (|c_osc|)/R must fit inside the gap 0.9 above c_lin and 0.9 below
    assert R == pytest.approx(0.5 / 0.9, rel=1e-9)


def test_clamp_radius_fails_outside_bracket():
    with pytest.raises(HypothesisError):
        clamp_radius(NonlinearitySpec(c_lin=1.0), -1.15, 0.65)


def test_resolvent_scalar_and_variable(small_space):
    rhs = random_odd_field(small_space, np.random.default_rng(0), 1.0)
    y = resolvent_apply(-0.25, rhs)
    assert (apply_L(y) - y * -0.25 - rhs).norm() < 1e-13

    grid = small_space.fine_grid_
    omega = 2 * np.pi / grid.T
    gamma = GridField(-0.25 + 0.2 * np.cos(2 * omega * grid.t)[:, None] * np.ones(grid.x.size), grid)
    y = resolvent_apply(gamma, rhs)
    assert (apply_L(y) - multiply(gamma, y) - rhs).norm() < 1e-10


def test_resolvent_reports_resonant_mode(small_space):
    rhs = random_odd_field(small_space, np.random.default_rng(1), 1.0)
    with pytest.raises(ResonanceError) as info:
        resolvent_apply(0.75, rhs)
    assert info.value.index == (1, 1)


def test_variable_alpha_continuation(small_space):
    grid = small_space.fine_grid_
    omega = 2 * np.pi / grid.T
    alpha = GridField(-0.9 + 0.1 * np.cos(2 * omega * grid.t)[:, None] * np.sin(grid.x)[None, :], grid)
    spec = NonlinearitySpec(c_lin=-0.25, c_sat=0.125, forcing=mode_field(small_space, [("cos", 1, 1, 0.5)]))
    report = continuation_solve(spec, SolveConfig(15, 10, alpha=alpha, beta=0.65), small_space)
    assert report.residual_norm < 1e-8
    assert spectral_residual(report.solution, spec) < 1e-8
    assert report.bound_satisfied
    assert project_parity(report.solution, "even").norm() == 0.0


def test_solve_is_deterministic(small_space):
    spec = NonlinearitySpec(c_lin=-0.25, c_osc=0.3, forcing=mode_field(small_space, [("sin", 3, 2, 0.4)]))
    cfg = SolveConfig(15, 10, alpha=-1.15, beta=0.65)
    a = continuation_solve(spec, cfg, small_space).solution
    b = continuation_solve(spec, cfg, small_space).solution
    np.testing.assert_array_equal(a.a, b.a)
    np.testing.assert_array_equal(a.b, b.b)


def test_newton_budget_exhaustion_reports_path(small_space):
    spec = NonlinearitySpec(c_lin=-0.25, c_sat=0.125, forcing=mode_field(small_space, [("cos", 1, 1, 50.0)]))
    cfg = SolveConfig(15, 10, alpha=-1.15, beta=0.65, continuation_steps=2, newton_max_iter=1)
    with pytest.raises(ConvergenceError) as info:
        continuation_solve(spec, cfg, small_space)
    assert info.value.path[0] == (0.0, 0.0, 0)


def test_truncation_mismatch(small_space):
    with pytest.raises(ValueError):
        continuation_solve(SAT, SolveConfig(7, 10, alpha=-1.15, beta=0.65), small_space)


def test_probe_preconditions(small_space):
    forced = NonlinearitySpec(c_lin=-0.25, forcing=mode_field(small_space, [("cos", 1, 1, 0.5)]))
    with pytest.raises(HypothesisError):
        uniqueness_probe(forced, SolveConfig(15, 10, alpha=-0.375, beta=-0.125), small_space)
    steep = NonlinearitySpec(c_lin=-0.25, c_osc=0.5, symmetry="odd_f1_only")
    with pytest.raises(HypothesisError):
        uniqueness_probe(steep, SolveConfig(15, 10, alpha=-0.375, beta=-0.125), small_space)


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(continuation_steps=0)
    with pytest.raises(ValueError):
        SolveConfig(newton_tol=-1.0)
    with pytest.raises(TypeError):
        SolveConfig(m_max=2.5)


def test_estimator_predict_matches_grid(small_space):
    spec = NonlinearitySpec(c_lin=-0.25, forcing=mode_field(small_space, [("cos", 1, 1, 1.0)]))
    est = PeriodicSolver(alpha=-1.15, beta=0.65).fit(spec, small_space)
    g = synthesize(est.solution_)
    i, j = 7, 100
    X = np.array([[g.grid.t[i], g.grid.x[j]]])
    assert est.predict(X)[0] == pytest.approx(g.values[i, j], abs=1e-12)
    assert est.report_.converged
