"""Periodic solutions in the odd subspace by homotopy continuation.

The homotopy

    L_o y - (1 - s) alpha y - s F_o(y) = 0,    s: 0 -> 1,

starts from the invertible linear problem at s = 0, whose only solution is
y = 0, and is followed in equal steps of s. Each step is solved by Newton's
method in coefficient space; the Jacobian

    L_o - (1 - s) Gamma_alpha - s Gamma_{f'(y)}

is applied matrix free and inverted with GMRES, preconditioned by the
diagonal (mu_mn - mean(gamma))^{-1}.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    ConvergenceError,
    HypothesisError,
    ResonanceError,
    SymmetryError,
    check_positive_int,
    check_real,
)
from .function_space import (
    ODD,
    GridField,
    SpectralField,
    analyze,
    apply_L,
    apply_nonlinearity,
    synthesize,
)
from .verification import OddOperator, check_global_slopes, estimate_delta, multiplier_values
from .wave_spectrum import DEFAULT_KERNEL_TOL

__all__ = [
    "SolveConfig",
    "SolveReport",
    "ProbeReport",
    "clamp_slope_g",
    "clamp_radius",
    "resolvent_apply",
    "continuation_solve",
    "uniqueness_probe",
    "apriori_bound",
    "random_odd_field",
    "PeriodicSolver",
]

SYMMETRY_TOL = 1e-8


@dataclass
class SolveConfig:
    """Parameters of a continuation solve.

    ``alpha`` and ``beta`` are constants or even-parity spectral fields.
    ``R_clamp=None`` picks the smallest radius satisfying the asymptotic
    slope bounds (see :func:`clamp_radius`).
    """

    m_max: int = 15
    n_max: int = 10
    alpha: object = 0.0
    beta: object = 0.0
    continuation_steps: int = 10
    newton_tol: float = 1e-10
    newton_max_iter: int = 30
    R_clamp: float = None
    seed: int = 0
    kernel_tol: float = DEFAULT_KERNEL_TOL

    def __post_init__(self):
        check_positive_int(self.m_max, "m_max")
        check_positive_int(self.n_max, "n_max")
        check_positive_int(self.continuation_steps, "continuation_steps")
        check_positive_int(self.newton_max_iter, "newton_max_iter")
        check_real(self.newton_tol, "newton_tol", positive=True)
        check_real(self.kernel_tol, "kernel_tol", positive=True)
        if self.R_clamp is not None:
            check_real(self.R_clamp, "R_clamp", positive=True)


@dataclass
class SolveReport:
    solution: SpectralField
    residual_norm: float
    continuation_path: list
    apriori_bound: float
    bound_satisfied: bool
    delta_num: float = float("nan")
    h_R_norm: float = float("nan")
    R_clamp: float = float("nan")
    converged: bool = True

    def to_dict(self):
        return {
            "residual_norm": self.residual_norm,
            "solution_norm": self.solution.norm(),
            "apriori_bound": self.apriori_bound,
            "bound_satisfied": self.bound_satisfied,
            "delta_num": self.delta_num,
            "h_R_norm": self.h_R_norm,
            "R_clamp": self.R_clamp,
            "converged": self.converged,
            "continuation_path": [
                {"s": s, "norm": norm, "newton_iters": it} for s, norm, it in self.continuation_path
            ],
            "solution": self.solution.to_dict(),
        }


def clamp_slope_g(spec, alpha, R, y, forcing=0.0):
    """Slope function g with f(y) = g(y) y + theta(y).

    Equals f(y)/y for |y| >= R and interpolates linearly between alpha
    (at y = 0) and f(+-R)/R on |y| < R. ``alpha`` and ``forcing`` are the
    pointwise values of alpha(t, x) and e(t, x).
    """
    R = check_real(R, "R", positive=True)
    y = np.asarray(y, dtype=float)
    alpha = np.asarray(alpha, dtype=float)

    def fhat(v):
        return spec.value(v) + forcing

    safe = np.where(np.abs(y) >= R, y, 1.0)
    outer = fhat(safe) / safe
    pos = fhat(R) / R * (y / R) + (1.0 - y / R) * alpha
    neg = fhat(-R) / R * (y / R) + (1.0 + y / R) * alpha
    return np.where(np.abs(y) >= R, outer, np.where(y >= 0, pos, neg))


def clamp_radius(spec, alpha_min, beta_max, forcing_sup=0.0, eps=0.0, r_max=1e8):
    """Smallest R (on a geometric scan, then bisection) with
    alpha - eps <= f(y)/y <= beta + eps for all |y| >= R.

    Uses, for |y| >= R, c_sat y^2/(1+y^2) in c_sat [R^2/(1+R^2), 1] and
    |c_osc sin(y) + e| / |y| <= (|c_osc| + sup|e|) / R.
    """

    def ok(R):
        sat = sorted((spec.c_sat * R * R / (1 + R * R), spec.c_sat))
        spread = (abs(spec.c_osc) + forcing_sup) / R
        lo = spec.c_lin + sat[0] - spread
        hi = spec.c_lin + sat[1] + spread
        return lo >= alpha_min - eps and hi <= beta_max + eps

    R = 1e-3
    while not ok(R):
        R *= 2.0
        if R > r_max:
            raise HypothesisError(
                "asymptotic slope of the nonlinearity lies outside [alpha, beta]; no clamp radius exists"
            )
    lo, hi = R / 2.0, R
    if ok(lo):
        return lo
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def resolvent_apply(gamma, rhs, tol=1e-12, kernel_tol=DEFAULT_KERNEL_TOL):
    """Solve (L_o - Gamma_gamma) y = rhs on the truncated odd subspace."""
    space = rhs.space
    if rhs.parity_tag != ODD:
        raise HypothesisError("resolvent_apply needs an odd-parity right-hand side")
    op = OddOperator(space, gamma)
    b = rhs.odd_vector()
    x = _solve(op, b, tol, kernel_tol)
    return SpectralField.from_odd_vector(x, space)


def _solve(op, b, tol, kernel_tol):
    d = op.diagonal
    small = np.abs(d) <= kernel_tol
    if np.any(small):
        kind, m, n = op.space.odd_index()[int(np.argmax(small))]
        raise ResonanceError(
            f"resonant truncation: mu({m},{n}) - mean(gamma) = {d[small][0]:.3e} is within kernel_tol",
            index=(m, n),
        )
    if op.scalar is not None:
        return b / d
    n = op.size
    M = LinearOperator((n, n), matvec=lambda v: v / d, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n)
    x, info = gmres(op.as_linear_operator(), b, M=M, rtol=tol, atol=0.0, restart=60, maxiter=200)
    if info != 0:
        raise ConvergenceError(f"GMRES did not converge (info={info})")
    return x


class _OddProblem:
    """Residual and Jacobian of the homotopy on packed odd vectors."""

    def __init__(self, spec, space, alpha):
        self.spec = spec
        self.space = space
        self.fine = space.dealias
        self.grid = space.fine_grid_ if self.fine else space.grid_
        self.mu = space.odd_mu_vector()
        self.alpha_scalar = not isinstance(alpha, (SpectralField, GridField)) and np.ndim(alpha) == 0
        self.alpha = float(alpha) if self.alpha_scalar else None
        self.alpha_values = multiplier_values(alpha, space, fine=self.fine)
        forcing = spec.forcing_on(space) if spec.forcing is not None else None
        self.forcing_values = synthesize(forcing, fine=self.fine).values if forcing is not None else 0.0
        # a linear nonlinearity with constant alpha keeps every multiplier constant
        self.linear = spec.c_sat == 0.0 and spec.c_osc == 0.0

    def field(self, v):
        return SpectralField.from_odd_vector(v, self.space)

    def nonlinear(self, v):
        """(odd part of P F(y), y on the grid)."""
        y = synthesize(self.field(v), fine=self.fine)
        F = analyze(GridField(self.spec.value(y.values) + self.forcing_values, y.grid), self.space)
        even = ~self.space.odd_rows
        leak = np.sqrt(np.sum(F.a[even] ** 2) + np.sum(F.b[even] ** 2))
        if leak > SYMMETRY_TOL * (1.0 + np.linalg.norm(v)):
            raise SymmetryError(f"nonlinearity left the odd subspace (even-part norm {leak:.3e})")
        return F.odd_vector(), y

    def alpha_times(self, v):
        if self.alpha_scalar:
            return self.alpha * v
        return OddOperator(self.space, GridField(self.alpha_values, self.grid)).gamma_apply(v)

    def residual(self, v, s):
        Fv, y = self.nonlinear(v)
        return self.mu * v - (1.0 - s) * self.alpha_times(v) - s * Fv, Fv, y

    def jacobian_multiplier(self, y, s):
        if self.alpha_scalar and self.linear:
            return (1.0 - s) * self.alpha + s * self.spec.c_lin
        values = (1.0 - s) * self.alpha_values + s * self.spec.derivative(y.values)
        return GridField(values, self.grid)


def _newton(problem, v, s, tol, max_iter, kernel_tol, krylov_tol=1e-12):
    """Damped Newton at fixed s. Returns (v, iterations, residual, F(v))."""
    r, Fv, y = problem.residual(v, s)
    rnorm = np.linalg.norm(r)
    for it in range(max_iter + 1):
        if rnorm <= tol * (1.0 + np.linalg.norm(Fv)):
            return v, it, rnorm, Fv
        if it == max_iter:
            break
        op = OddOperator(problem.space, problem.jacobian_multiplier(y, s))
        step = _solve(op, -r, krylov_tol, kernel_tol)
        lam = 1.0
        for _ in range(30):
            trial = v + lam * step
            r_new, F_new, y_new = problem.residual(trial, s)
            if np.linalg.norm(r_new) < (1.0 - 1e-4 * lam) * rnorm:
                break
            lam *= 0.5
        else:
            raise ConvergenceError(f"line search failed at s={s:g} (residual {rnorm:.3e})")
        v, r, Fv, y = trial, r_new, F_new, y_new
        rnorm = np.linalg.norm(r)
    raise ConvergenceError(
        f"Newton did not converge at s={s:g} in {max_iter} iterations (residual {rnorm:.3e})"
    )


def apriori_bound(spec, cfg, space, R):
    """(1/delta_num)(2||h_R|| + pi T ||alpha||_inf) and its ingredients.

    delta_num is the smaller of the coercivity estimates at gamma = alpha
    and gamma = beta; h_R is the envelope (|c_lin| + |c_sat|) R + |c_osc| + |e|.
    """
    grid = space.fine_grid_ if space.dealias else space.grid_
    forcing = synthesize(spec.forcing_on(space), fine=space.dealias).values if spec.forcing is not None else 0.0
    h = spec.envelope(R, forcing) * np.ones(grid.shape)
    h_norm = float(np.sqrt(grid.integrate(h * h)))
    alpha_sup = float(np.max(np.abs(multiplier_values(cfg.alpha, space, fine=space.dealias))))
    delta = min(estimate_delta(cfg.alpha, space), estimate_delta(cfg.beta, space))
    numerator = 2.0 * h_norm + np.pi * grid.T * alpha_sup
    bound = numerator / delta if delta > 0 else float("inf")
    return bound, delta, h_norm


def _forcing_sup(spec, space):
    if spec.forcing is None:
        return 0.0
    return float(np.max(np.abs(synthesize(spec.forcing_on(space), fine=space.dealias).values)))


def _resolve_radius(spec, cfg, space):
    if cfg.R_clamp is not None:
        return float(cfg.R_clamp)
    a = multiplier_values(cfg.alpha, space, fine=False)
    b = multiplier_values(cfg.beta, space, fine=False)
    return clamp_radius(spec, float(a.max()), float(b.min()), _forcing_sup(spec, space))


def _check_space(cfg, space):
    space.period_.require_even()
    if (space.m_max, space.n_max) != (cfg.m_max, cfg.n_max):
        raise ValueError(
            f"space truncation ({space.m_max}, {space.n_max}) differs from the config ({cfg.m_max}, {cfg.n_max})"
        )


def continuation_solve(spec, cfg, space):
    """Follow the homotopy from s = 0 to s = 1 and return a :class:`SolveReport`."""
    _check_space(cfg, space)
    problem = _OddProblem(spec, space, cfg.alpha)
    v = np.zeros(space.odd_size)
    path = [(0.0, 0.0, 0)]
    for k in range(1, cfg.continuation_steps + 1):
        s = k / cfg.continuation_steps
        try:
            v, iters, _, _ = _newton(problem, v, s, cfg.newton_tol, cfg.newton_max_iter, cfg.kernel_tol)
        except ConvergenceError as exc:
            raise ConvergenceError(str(exc), path=path) from exc
        path.append((s, float(np.linalg.norm(v)), iters))

    solution = SpectralField.from_odd_vector(v, space)
    residual = (apply_L(solution) - apply_nonlinearity(spec, solution)).norm()
    R = _resolve_radius(spec, cfg, space)
    bound, delta, h_norm = apriori_bound(spec, cfg, space, R)
    return SolveReport(
        solution=solution,
        residual_norm=float(residual),
        continuation_path=path,
        apriori_bound=float(bound),
        bound_satisfied=bool(solution.norm() <= bound),
        delta_num=float(delta),
        h_R_norm=h_norm,
        R_clamp=R,
    )


def random_odd_field(space, rng, norm):
    """Random odd field with coefficients ~ N(0, 1)/(1 + m^2 + n^2), rescaled to ``norm``."""
    m = np.arange(space.m_max + 1)[:, None]
    n = np.arange(1, space.n_max + 1)[None, :]
    decay = 1.0 / (1.0 + m**2 + n**2)
    mask = space.odd_rows[:, None]
    a = rng.normal(size=decay.shape) * decay * mask
    b = rng.normal(size=decay.shape) * decay * mask
    field = SpectralField(a, b, space, ODD)
    return field * (norm / field.norm())


@dataclass
class ProbeReport:
    starts: list
    solutions: list = field(default_factory=list)
    apriori_bound: float = float("nan")
    max_pairwise_distance: float = 0.0

    @property
    def n_distinct(self):
        return len(self.solutions)

    @property
    def all_converged(self):
        return all(s["converged"] for s in self.starts)

    @property
    def max_solution_norm(self):
        return max((s.norm() for s in self.solutions), default=0.0)

    def to_dict(self):
        return {
            "n_starts": len(self.starts),
            "n_distinct": self.n_distinct,
            "all_converged": self.all_converged,
            "max_solution_norm": self.max_solution_norm,
            "max_pairwise_distance": self.max_pairwise_distance,
            "apriori_bound": self.apriori_bound,
            "starts": self.starts,
        }


def uniqueness_probe(spec, cfg, space, num_starts=20, distinct_tol=1e-4):
    """Newton at s = 1 from seeded random odd starts; collect distinct limits."""
    _check_space(cfg, space)
    num_starts = check_positive_int(num_starts, "num_starts")
    if spec.has_forcing or spec.symmetry != "odd_f1_only":
        raise HypothesisError("uniqueness probe needs an odd nonlinearity with zero forcing")
    if not all(np.ndim(g) == 0 for g in (cfg.alpha, cfg.beta)):
        raise HypothesisError("uniqueness probe supports constant alpha and beta")
    slopes = check_global_slopes(spec, cfg.alpha, cfg.beta)
    if not slopes:
        raise HypothesisError(
            f"incremental slopes [{slopes.slope_min:g}, {slopes.slope_max:g}] are not within "
            f"[{cfg.alpha:g}, {cfg.beta:g}]"
        )
    R = _resolve_radius(spec, cfg, space)
    bound, _, _ = apriori_bound(spec, cfg, space, R)
    problem = _OddProblem(spec, space, cfg.alpha)
    rng = np.random.default_rng(cfg.seed)
    starts, finals = [], []
    for i in range(num_starts):
        norm0 = float(rng.uniform(0.0, 10.0 * bound)) if np.isfinite(bound) else 10.0
        v0 = random_odd_field(space, rng, max(norm0, 1e-3)).odd_vector()
        entry = {"start": i, "initial_norm": float(np.linalg.norm(v0))}
        try:
            v, iters, res, _ = _newton(problem, v0, 1.0, cfg.newton_tol, cfg.newton_max_iter, cfg.kernel_tol)
            entry.update(converged=True, iterations=iters, residual=float(res), final_norm=float(np.linalg.norm(v)))
            finals.append(v)
        except ConvergenceError as exc:
            entry.update(converged=False, error=str(exc))
        starts.append(entry)

    distinct = []
    for v in finals:
        if all(np.linalg.norm(v - w) > distinct_tol for w in distinct):
            distinct.append(v)
    pairwise = max(
        (np.linalg.norm(v - w) for i, v in enumerate(finals) for w in finals[i + 1 :]),
        default=0.0,
    )
    return ProbeReport(
        starts=starts,
        solutions=[SpectralField.from_odd_vector(v, space) for v in distinct],
        apriori_bound=float(bound),
        max_pairwise_distance=float(pairwise),
    )


class PeriodicSolver(BaseEstimator):
    """Estimator interface to :func:`continuation_solve`.

    ``fit(spec, space)`` solves the problem for the nonlinearity ``spec`` on a
    fitted :class:`~varwave.function_space.SpectralSpace`; ``predict(X)``
    evaluates the solution at points ``X[:, 0] = t``, ``X[:, 1] = x``.
    """

    def __init__(
        self,
        alpha=0.0,
        beta=0.0,
        continuation_steps=10,
        newton_tol=1e-10,
        newton_max_iter=30,
        R_clamp=None,
        seed=0,
        kernel_tol=DEFAULT_KERNEL_TOL,
    ):
        self.alpha = alpha
        self.beta = beta
        self.continuation_steps = continuation_steps
        self.newton_tol = newton_tol
        self.newton_max_iter = newton_max_iter
        self.R_clamp = R_clamp
        self.seed = seed
        self.kernel_tol = kernel_tol

    def config_for(self, space):
        return SolveConfig(m_max=space.m_max, n_max=space.n_max, **self.get_params())

    def fit(self, spec, space):
        self.report_ = continuation_solve(spec, self.config_for(space), space)
        self.solution_ = self.report_.solution
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != 2:
            raise ValueError("X must have two columns (t, x)")
        c = self.solution_
        space = c.space
        t, x = X[:, 0], X[:, 1]
        phi = space.basis_.phi_at(x)[:, : space.n_max]
        m = np.arange(space.m_max + 1)
        arg = space.period_.omega * np.outer(t, m)
        cos_part = (np.cos(arg) * space.norm_factor_) @ c.a
        sin_part = (np.sin(arg) * space.norm_factor_) @ c.b
        return np.sum((cos_part + sin_part) * phi, axis=1)
