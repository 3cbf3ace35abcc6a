"""Numerical checks of the nonresonance hypotheses and of computed solutions."""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import LinearOperator, eigsh, minres

from ._validation import ConvergenceError, HypothesisError, check_positive_int
from .function_space import (
    EVEN,
    GridField,
    SpectralField,
    analyze,
    apply_L,
    apply_nonlinearity,
    mode_field,
    synthesize,
)
from .wave_spectrum import DEFAULT_KERNEL_TOL, consecutive_pair, kernel_basis

__all__ = [
    "NonresonanceReport",
    "SlopeCheck",
    "check_nonresonance",
    "estimate_delta",
    "weak_residual",
    "spectral_residual",
    "check_global_slopes",
    "largest_admissible_margin",
    "multiplier_values",
    "GRAM_TOL",
]

GRAM_TOL = 1e-10


def multiplier_values(gamma, space, fine=True):
    """Samples of a multiplier (scalar, even field or grid field) on a grid."""
    grid = space.fine_grid_ if fine else space.grid_
    if isinstance(gamma, SpectralField):
        if gamma.parity_tag != EVEN:
            raise HypothesisError("multipliers must lie in the T/2-periodic (even) subspace")
        return synthesize(gamma, fine=fine).values
    if isinstance(gamma, GridField):
        if gamma.grid is grid:
            return gamma.values
        if gamma.grid.space is not space:
            raise ValueError("multiplier is sampled on a grid of a different space")
        return _resample(gamma, grid)
    arr = np.asarray(gamma, dtype=float)
    if arr.ndim == 0:
        return np.full(grid.shape, float(arr))
    if arr.shape != grid.shape:
        raise ValueError(f"multiplier array must have shape {grid.shape}")
    return arr


def _resample(g, grid):
    """Cubic interpolation of grid samples onto another grid, periodic in t."""
    src = g.grid
    t = np.append(src.t, src.T)
    values = np.vstack([g.values, g.values[:1]])
    interp = RegularGridInterpolator((t, src.x), values, method="cubic")
    tt, xx = np.meshgrid(grid.t, grid.x, indexing="ij")
    return interp(np.column_stack([tt.ravel(), xx.ravel()])).reshape(grid.shape)


def _is_scalar(gamma):
    return not isinstance(gamma, (SpectralField, GridField)) and np.ndim(gamma) == 0


class OddOperator:
    """L_o - Gamma_gamma on packed odd coefficient vectors (matrix free)."""

    def __init__(self, space, gamma):
        self.space = space
        self.mu = space.odd_mu_vector()
        if _is_scalar(gamma):
            self.scalar = float(gamma)
            self.values = None
            self.mean = self.scalar
        else:
            self.scalar = None
            self.values = multiplier_values(gamma, space, fine=space.dealias)
            grid = space.fine_grid_ if space.dealias else space.grid_
            self.mean = grid.integrate(self.values) / grid.integrate(np.ones(grid.shape))
        self.diagonal = self.mu - self.mean

    @property
    def size(self):
        return len(self.mu)

    def gamma_apply(self, v):
        if self.scalar is not None:
            return self.scalar * v
        space = self.space
        y = synthesize(SpectralField.from_odd_vector(v, space), fine=space.dealias)
        return analyze(GridField(self.values * y.values, y.grid), space).odd_vector()

    def matvec(self, v):
        return self.mu * v - self.gamma_apply(v)

    def as_linear_operator(self):
        return LinearOperator((self.size, self.size), matvec=self.matvec, dtype=float)


def estimate_delta(gamma, space, kernel_tol=DEFAULT_KERNEL_TOL, tol=1e-12):
    """Smallest singular value of L_o - gamma on the truncated odd subspace.

    The operator is symmetric, so this is its eigenvalue of least modulus.
    It is found by shift-invert Lanczos (ARPACK) at shift 0, with inner
    solves by MINRES preconditioned by the diagonal |mu - mean(gamma)|.
    The value returned is ||A v|| for the converged unit Ritz vector v.
    """
    space.period_.require_even()
    op = OddOperator(space, gamma)
    n = op.size
    d = op.diagonal
    d_reg = np.where(np.abs(d) < kernel_tol, np.where(d < 0, -kernel_tol, kernel_tol), d)
    if op.scalar is not None:
        solve = lambda v: v / d_reg  # noqa: E731  exact inverse of a diagonal operator
    else:
        A = op.as_linear_operator()
        M = LinearOperator((n, n), matvec=lambda v: v / np.abs(d_reg), dtype=float)

        def solve(v):
            x, info = minres(A, v, M=M, rtol=tol, maxiter=20 * n)
            if info > 0:
                raise ConvergenceError(f"MINRES did not converge in estimate_delta (info={info})")
            return x

    if n <= 2:
        dense = np.column_stack([op.matvec(e) for e in np.eye(n)])
        return float(np.min(np.abs(np.linalg.eigvalsh(0.5 * (dense + dense.T)))))
    OPinv = LinearOperator((n, n), matvec=solve, dtype=float)
    v0 = np.ones(n) / np.sqrt(n)
    try:
        _, vecs = eigsh(op.as_linear_operator(), k=1, sigma=0.0, which="LM", OPinv=OPinv, v0=v0, tol=tol)
    except Exception as exc:  # ARPACK raises its own exception hierarchy
        raise ConvergenceError(f"Lanczos iteration failed in estimate_delta: {exc}") from exc
    v = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    return float(np.linalg.norm(op.matvec(v)))


@dataclass
class NonresonanceReport:
    bracketing_ok: bool
    gram_lower: float
    gram_upper: float
    epsilon_margin: float
    verdict: bool
    lambda_lower: float
    lambda_upper: float
    kernel_lower: list = field(default_factory=list)
    kernel_upper: list = field(default_factory=list)
    weighted: bool = False

    def to_dict(self):
        return asdict(self)


def _kernel_gram(space, indices, weight, weighted):
    """Smallest eigenvalue of int weight v_k v_l over the kernel basis (inf if empty)."""
    if not indices:
        return float("inf")
    grid = space.grid_
    funcs = []
    for m, n in indices:
        for kind in ("cos", "sin"):
            funcs.append(synthesize(mode_field(space, [(kind, m, n, 1.0)])).values)
    w = grid.wx * grid.u if weighted else grid.wx
    G = np.empty((len(funcs), len(funcs)))
    for i, vi in enumerate(funcs):
        for j in range(i, len(funcs)):
            G[i, j] = G[j, i] = grid.dt * np.sum((weight * vi * funcs[j]) @ w)
    return float(np.linalg.eigvalsh(G)[0])


def _pair_for(spectrum, lo, hi):
    level = 0.5 * (lo + hi)
    try:
        return consecutive_pair(spectrum, level)
    except ValueError:
        # midpoint sits on an eigenvalue: bracket just below it
        return consecutive_pair(spectrum, level - 10 * spectrum.kernel_tol)


def check_nonresonance(alpha, beta, spectrum, space, pair=None, weighted=False):
    """Check the bracketing and kernel positivity conditions for alpha, beta.

    ``pair`` overrides the consecutive eigenvalues; by default they bracket
    the midpoint of [min alpha, max beta]. The kernel Gram forms use plain
    dt dx measure unless ``weighted`` is set.
    """
    a = multiplier_values(alpha, space, fine=False)
    b = multiplier_values(beta, space, fine=False)
    lower, upper = pair if pair is not None else _pair_for(spectrum, a.min(), b.max())
    # absorb eigen-solve rounding in lambda_n^2 when alpha or beta sit exactly on an eigenvalue
    slack = 1e-12 * max(1.0, abs(lower), abs(upper))
    bracketing_ok = bool(np.all(lower - slack <= a) and np.all(a <= b) and np.all(b <= upper + slack))
    k_lower = kernel_basis(spectrum, lower)
    k_upper = kernel_basis(spectrum, upper)
    gram_lower = _kernel_gram(space, k_lower, a - lower, weighted)
    gram_upper = _kernel_gram(space, k_upper, upper - b, weighted)
    verdict = bracketing_ok and gram_lower > GRAM_TOL and gram_upper > GRAM_TOL
    return NonresonanceReport(
        bracketing_ok=bracketing_ok,
        gram_lower=gram_lower,
        gram_upper=gram_upper,
        epsilon_margin=float(min(np.min(a - lower), np.min(upper - b))),
        verdict=bool(verdict),
        lambda_lower=float(lower),
        lambda_upper=float(upper),
        kernel_lower=k_lower,
        kernel_upper=k_upper,
        weighted=weighted,
    )


def largest_admissible_margin(alpha, beta, space, threshold, eps_max=1.0, samples=64, iters=40):
    """Largest eps such that min(delta(alpha - e), delta(beta + e)) >= threshold for all e in [0, eps].

    delta is not monotone in e (it dips to zero at every eigenvalue crossed),
    so the first failing e is located on a uniform scan of ``samples`` points
    and then refined by bisection. A dip narrower than the scan spacing can
    be missed; this is a diagnostic, not a certified margin.
    """
    a = multiplier_values(alpha, space, fine=space.dealias)
    b = multiplier_values(beta, space, fine=space.dealias)
    grid = space.fine_grid_ if space.dealias else space.grid_
    constant = np.ptp(a) == 0 and np.ptp(b) == 0

    def ok(eps):
        if constant:
            fields = [float(a.flat[0] - eps), float(b.flat[0] + eps)]
        else:
            fields = [GridField(a - eps, grid), GridField(b + eps, grid)]
        return min(estimate_delta(g, space) for g in fields) >= threshold

    if not ok(0.0):
        return 0.0
    scan = np.linspace(0.0, eps_max, samples + 1)
    lo = 0.0
    for eps in scan[1:]:
        if not ok(eps):
            hi = eps
            break
        lo = eps
    else:
        return float(eps_max)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return float(lo)


def spectral_residual(y, spec):
    """||L y - P F(y)|| in coefficient space."""
    return (apply_L(y) - apply_nonlinearity(spec, y)).norm()


def _test_function(rng, space, terms):
    """Random psi = sum c sin(kx) {cos, sin}(2 pi j t / T) and its derivative data."""
    k = rng.integers(1, space.n_max + 1, size=terms)
    j = rng.integers(0, space.m_max + 1, size=terms)
    kind = rng.integers(0, 2, size=terms)
    coef = rng.normal(size=terms)
    return k, j, kind, coef


def weak_residual(y, spec, num_tests=10, seed=0, terms=3):
    """Largest normalised defect of the weak formulation over random tests.

    For each test function psi the defect is
    |int y (u psi_tt - (u psi_x)_x) dt dx - int u f(y) psi dt dx| / ||psi||.
    """
    num_tests = check_positive_int(num_tests, "num_tests")
    space = y.space
    grid = space.fine_grid_
    prof = space.basis_.profile
    u, du = grid.u, prof.du(grid.x)
    omega = 2.0 * np.pi / grid.T
    yv = synthesize(y, fine=True).values
    fv = spec.value(yv)
    if spec.forcing is not None:
        fv = fv + synthesize(spec.forcing_on(space), fine=True).values

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(num_tests):
        k, j, kind, coef = _test_function(rng, space, terms)
        psi = np.zeros(grid.shape)
        psi_tt = np.zeros(grid.shape)
        psi_x = np.zeros(grid.shape)
        psi_xx = np.zeros(grid.shape)
        for kk, jj, kd, c in zip(k, j, kind, coef):
            tpart = np.cos(omega * jj * grid.t) if kd == 0 else np.sin(omega * jj * grid.t)
            sx, cx = np.sin(kk * grid.x), np.cos(kk * grid.x)
            psi += c * np.outer(tpart, sx)
            psi_tt -= c * (omega * jj) ** 2 * np.outer(tpart, sx)
            psi_x += c * kk * np.outer(tpart, cx)
            psi_xx -= c * kk * kk * np.outer(tpart, sx)
        norm = np.sqrt(grid.integrate(psi * psi))
        if norm == 0.0:
            continue
        operator = u * psi_tt - (du * psi_x + u * psi_xx)
        lhs = grid.integrate(yv * operator, weighted=False)
        rhs = grid.integrate(fv * psi, weighted=True)
        worst = max(worst, abs(lhs - rhs) / norm)
    return float(worst)


@dataclass
class SlopeCheck:
    passed: bool
    slope_min: float
    slope_max: float
    alpha: float
    beta: float

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return asdict(self)


def check_global_slopes(spec, alpha, beta):
    """Whether every difference quotient of f lies in [alpha, beta].

    For the parametric family this follows from the enclosure of f'(y).
    """
    if spec.has_forcing:
        raise HypothesisError("the global slope condition is stated for zero forcing")
    lo, hi = spec.slope_range()
    return SlopeCheck(bool(alpha <= lo and hi <= beta), lo, hi, float(alpha), float(beta))
