"""Dirichlet Sturm-Liouville eigenpairs of (u phi')' = -lambda^2 u phi on [0, pi].

The problem is solved in Liouville normal form. With psi = sqrt(u) phi it reads

    -psi'' + eta_u psi = lambda^2 psi,    psi(0) = psi(pi) = 0,

which is discretised by a sine Galerkin method. The stiffness matrix is
k^2 on the diagonal plus the potential coupling

    (2/pi) int eta_u sin(kx) sin(lx) dx = (c_{|k-l|} - c_{k+l}) / pi,

where c_j are cosine moments of eta_u computed by Gauss-Legendre quadrature.
"""

import numpy as np
from scipy.linalg import eigh
from scipy.special import roots_legendre
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import ConvergenceError, check_in_interval, check_positive_int

__all__ = [
    "EigenBasis",
    "SturmLiouvilleSolver",
    "solve_eigenbasis",
    "asymptotics_report",
    "galerkin_dimension",
]

SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def galerkin_dimension(n_max):
    return max(4 * n_max, 128)


def _cosine_moments(profile, order, n_quad):
    """c_j = int_0^pi eta_u(x) cos(j x) dx for j = 0..order."""
    nodes, weights = roots_legendre(n_quad)
    x = 0.5 * np.pi * (nodes + 1.0)
    w = 0.5 * np.pi * weights * profile.eta(x)
    if not np.all(np.isfinite(w)):
        raise ConvergenceError(f"eta_u is not finite on [0, pi] for {profile!r}")
    j = np.arange(order + 1)
    return np.cos(np.outer(j, x)) @ w


def _stiffness_matrix(profile, K):
    c = _cosine_moments(profile, 2 * K, 4 * K + 64)
    k = np.arange(1, K + 1)
    diff = np.abs(k[:, None] - k[None, :])
    total = k[:, None] + k[None, :]
    return np.diag(k.astype(float) ** 2) + (c[diff] - c[total]) / np.pi


class EigenBasis:
    """First ``n_max`` Dirichlet eigenpairs with u-weighted normalisation.

    Attributes
    ----------
    lambda_sq : ndarray, shape (n_max,)
        Increasing eigenvalues lambda_n^2.
    phi : ndarray, shape (grid_size, n_max)
        phi_n at the profile grid points.
    sine_coef : ndarray, shape (K, n_max)
        Coefficients of psi_n = sqrt(u) phi_n in the orthonormal basis
        sqrt(2/pi) sin(kx), k = 1..K.
    """

    def __init__(self, profile, lambda_sq, sine_coef):
        self.profile = profile
        self.lambda_sq = np.asarray(lambda_sq, dtype=float)
        self.sine_coef = np.asarray(sine_coef, dtype=float)
        self.n_max = len(self.lambda_sq)
        self.galerkin_dim = self.sine_coef.shape[0]
        self.grid = profile.grid
        self.phi = self.phi_at(self.grid)
        for arr in (self.lambda_sq, self.sine_coef, self.phi):
            arr.setflags(write=False)

    def psi_at(self, x):
        x = check_in_interval(x, 0.0, np.pi)
        k = np.arange(1, self.galerkin_dim + 1)
        return SQRT_2_OVER_PI * np.sin(np.multiply.outer(x, k)) @ self.sine_coef

    def phi_at(self, x):
        """phi_n(x) for every n; shape ``x.shape + (n_max,)``."""
        x = np.asarray(x, dtype=float)
        return self.psi_at(x) / np.sqrt(self.profile.u(x))[..., None]

    def weighted_gram(self):
        """u-weighted Gram matrix of phi_1..phi_n by Simpson quadrature on the grid."""
        from scipy.integrate import simpson

        weighted = self.phi * self.profile.u(self.grid)[:, None]
        return simpson(weighted[:, :, None] * self.phi[:, None, :], x=self.grid, axis=0)

    def __repr__(self):
        return f"EigenBasis(n_max={self.n_max}, galerkin_dim={self.galerkin_dim}, profile={self.profile!r})"


def solve_eigenbasis(profile, n_max, galerkin_dim=None):
    """Solve for the first ``n_max`` eigenpairs of the Sturm-Liouville problem."""
    n_max = check_positive_int(n_max, "n_max")
    K = galerkin_dimension(n_max) if galerkin_dim is None else check_positive_int(galerkin_dim, "galerkin_dim")
    if n_max > K // 2:
        raise ValueError(f"n_max={n_max} exceeds half the Galerkin dimension K={K}")

    A = _stiffness_matrix(profile, K)
    if not np.all(np.isfinite(A)):
        raise ConvergenceError(f"non-finite stiffness matrix for {profile!r}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * np.abs(A).max()):
        raise ConvergenceError(f"stiffness matrix is not symmetric for {profile!r}")
    values, vectors = eigh(A, subset_by_index=(0, n_max - 1))
    if np.any(np.diff(values) <= 0):
        raise ConvergenceError(f"eigenvalues are not simple for {profile!r}: {values}")

    vectors = vectors / np.linalg.norm(vectors, axis=0)
    # phi_n'(0) = u(0)^(-1/2) psi_n'(0), and psi_n'(0) = sqrt(2/pi) sum_k k v_k
    slope0 = np.arange(1, K + 1) @ vectors
    vectors = vectors * np.where(slope0 < 0, -1.0, 1.0)
    return EigenBasis(profile, values, vectors)


def asymptotics_report(basis):
    """Rows (n, lambda_n^2 - n^2 - kappa/pi) for n = 1..n_max."""
    if basis.n_max < 10:
        raise ValueError("asymptotics_report needs a basis with n_max >= 10")
    n = np.arange(1, basis.n_max + 1)
    defect = basis.lambda_sq - n**2 - basis.profile.kappa() / np.pi
    return np.column_stack([n, defect])


class SturmLiouvilleSolver(BaseEstimator):
    """Estimator wrapper around :func:`solve_eigenbasis`.

    ``fit`` takes a :class:`~varwave.coefficient.CoefficientProfile`;
    ``transform`` maps points x in [0, pi] to eigenfunction values
    ``phi_n(x)``, one column per n.
    """

    def __init__(self, n_max=20, galerkin_dim=None):
        self.n_max = n_max
        self.galerkin_dim = galerkin_dim

    def fit(self, profile, y=None):
        self.basis_ = solve_eigenbasis(profile, self.n_max, self.galerkin_dim)
        self.lambda_sq_ = self.basis_.lambda_sq
        self.kappa_ = profile.kappa()
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        x = np.asarray(X, dtype=float).reshape(-1)
        return self.basis_.phi_at(x)

    def fit_transform(self, profile, y=None, X=None):
        self.fit(profile)
        return self.transform(profile.grid if X is None else X)

    def defects(self):
        check_is_fitted(self, "basis_")
        return asymptotics_report(self.basis_)[:, 1]
