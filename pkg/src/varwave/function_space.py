"""Spectral representation of functions on (0, T) x (0, pi).

A function is expanded in the u-orthonormal system

    T_m phi_n(x) cos(q m t / p),   T_m phi_n(x) sin(q m t / p),

with T_0 = 1/sqrt(T) and T_m = sqrt(2/T) for m >= 1. Coefficients are stored
as two arrays ``a`` and ``b`` of shape (m_max + 1, n_max); row m = 0 of ``b``
is always zero. Odd rows span the T/2-antiperiodic subspace, even rows the
T/2-periodic one.

Transforms are pseudo-spectral: an rFFT in t and a u-weighted Simpson
projection onto phi_n in x. Pointwise products and nonlinearities are
evaluated on a grid padded by the 3/2 rule in both directions.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import simpson
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import SymmetryError, check_finite_array, check_positive_int, check_real

__all__ = [
    "Grid",
    "GridField",
    "SpectralField",
    "SpectralSpace",
    "NonlinearitySpec",
    "ODD",
    "EVEN",
    "MIXED",
    "weighted_inner",
    "analyze",
    "synthesize",
    "project_parity",
    "apply_L",
    "multiply",
    "nemytskii",
    "apply_nonlinearity",
    "jacobian_apply",
    "mode_field",
]

ODD, EVEN, MIXED = "odd_subspace", "even_subspace", "mixed"
_TARGETS = {"odd": ODD, "even": EVEN, ODD: ODD, EVEN: EVEN}

# d/dy [y^3 / (1 + y^2)] = (y^4 + 3 y^2) / (1 + y^2)^2 takes values in [0, 9/8]
SAT_SLOPE_MAX = 9.0 / 8.0


def _simpson_weights(x):
    return simpson(np.eye(len(x)), x=x, axis=0)


def _time_points(m_max, p):
    """Smallest multiple of 2p that is >= 4 m_max (and >= 8)."""
    target = max(4 * m_max, 8)
    return -(-target // (2 * p)) * (2 * p)


class Grid:
    """Tensor grid with quadrature weights and eigenfunction samples."""

    def __init__(self, space, n_t, x):
        basis, period = space.basis_, space.period_
        self.space = space
        self.n_t = n_t
        self.T = period.T
        self.dt = self.T / n_t
        self.t = np.arange(n_t) * self.dt
        self.x = x
        self.n_x = len(x)
        self.u = basis.profile.u(x)
        self.wx = _simpson_weights(x)
        self.phi = basis.phi_at(x)[:, : space.n_max]
        # rows: u-weighted quadrature functionals for phi_n
        self.proj = (self.phi * (self.wx * self.u)[:, None]).T

    @property
    def shape(self):
        return (self.n_t, self.n_x)

    def integrate(self, values, weighted=True):
        w = self.wx * self.u if weighted else self.wx
        return float(self.dt * np.sum(values @ w))


@dataclass(frozen=True)
class GridField:
    """Samples y(t_i, x_j) of a function on one of a space's grids."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        check_finite_array(self.values, "grid values", shape=self.grid.shape)

    def norm(self):
        return np.sqrt(max(weighted_inner(self, self), 0.0))

    def shift_half_period(self):
        """y(t + T/2, x) on the same grid."""
        return GridField(np.roll(self.values, -self.grid.n_t // 2, axis=0), self.grid)


class SpectralField:
    """Coefficients (a_mn, b_mn) of a function in the truncated basis."""

    def __init__(self, a, b, space, parity_tag=None):
        shape = (space.m_max + 1, space.n_max)
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)
        if a.shape != shape or b.shape != shape:
            raise ValueError(f"coefficient arrays must have shape {shape}, got {a.shape} and {b.shape}")
        if b[0].any():
            raise ValueError("b_0n must vanish (there is no sine mode at m = 0)")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        self.a, self.b, self.space = a, b, space
        odd = space.odd_rows
        has_odd = a[odd].any() or b[odd].any()
        has_even = a[~odd].any() or b[~odd].any()
        if parity_tag is None:
            parity_tag = MIXED if (has_odd and has_even) else (EVEN if has_even else ODD)
        if parity_tag == ODD and has_even:
            raise ValueError("field tagged odd_subspace has nonzero even-m coefficients")
        if parity_tag == EVEN and has_odd:
            raise ValueError("field tagged even_subspace has nonzero odd-m coefficients")
        if parity_tag not in (ODD, EVEN, MIXED):
            raise ValueError(f"unknown parity tag {parity_tag!r}")
        self.parity_tag = parity_tag

    @classmethod
    def zeros(cls, space, parity_tag=None):
        shape = (space.m_max + 1, space.n_max)
        return cls(np.zeros(shape), np.zeros(shape), space, parity_tag)

    @property
    def basis(self):
        return self.space.basis_

    @property
    def period(self):
        return self.space.period_

    def norm(self):
        """Weighted L^2 norm (Parseval in the orthonormal basis)."""
        return float(np.sqrt(np.sum(self.a**2) + np.sum(self.b**2)))

    def coefficient(self, kind, m, n):
        arr = self.a if kind == "cos" else self.b
        return float(arr[m, n - 1])

    def _combine(self, other, op):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.space is not self.space:
            raise ValueError("fields belong to different spectral spaces")
        tag = self.parity_tag if self.parity_tag == other.parity_tag else None
        return SpectralField(op(self.a, other.a), op(self.b, other.b), self.space, tag)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        scalar = check_real(scalar, "scalar")
        return SpectralField(self.a * scalar, self.b * scalar, self.space, self.parity_tag)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def odd_vector(self):
        """Odd-m coefficients packed as a flat vector (a rows, then b rows)."""
        odd = self.space.odd_rows
        return np.concatenate([self.a[odd].ravel(), self.b[odd].ravel()])

    @classmethod
    def from_odd_vector(cls, vector, space):
        odd = space.odd_rows
        k = int(odd.sum()) * space.n_max
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (2 * k,):
            raise ValueError(f"odd vector must have length {2 * k}, got {vector.shape}")
        a = np.zeros((space.m_max + 1, space.n_max))
        b = np.zeros_like(a)
        a[odd] = vector[:k].reshape(-1, space.n_max)
        b[odd] = vector[k:].reshape(-1, space.n_max)
        return cls(a, b, space, ODD)

    def resized(self, space):
        """Same coefficients embedded in (or truncated to) another space."""
        out_a = np.zeros((space.m_max + 1, space.n_max))
        out_b = np.zeros_like(out_a)
        mm = min(space.m_max, self.space.m_max) + 1
        nn = min(space.n_max, self.space.n_max)
        out_a[:mm, :nn] = self.a[:mm, :nn]
        out_b[:mm, :nn] = self.b[:mm, :nn]
        tag = None if self.parity_tag == MIXED else self.parity_tag
        return SpectralField(out_a, out_b, space, tag)

    def to_dict(self):
        period = self.period
        return {
            "p": period.p,
            "q": period.q,
            "n_max": self.space.n_max,
            "m_max": self.space.m_max,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "parity_tag": self.parity_tag,
        }

    @classmethod
    def from_dict(cls, data, space):
        """Inverse of :meth:`to_dict`; coefficients are re-embedded into ``space``."""
        period = space.period_
        if (data["p"], data["q"]) != (period.p, period.q):
            raise ValueError(f"field period p/q={data['p']}/{data['q']} does not match the space")
        a = np.asarray(data["a"], dtype=float)
        b = np.asarray(data["b"], dtype=float)
        shape = (data["m_max"] + 1, data["n_max"])
        if a.shape != shape or b.shape != shape:
            raise ValueError(f"coefficient arrays must have shape {shape}")
        out_a = np.zeros((space.m_max + 1, space.n_max))
        out_b = np.zeros_like(out_a)
        mm, nn = min(shape[0], space.m_max + 1), min(shape[1], space.n_max)
        out_a[:mm, :nn] = a[:mm, :nn]
        out_b[:mm, :nn] = b[:mm, :nn]
        tag = data.get("parity_tag")
        return cls(out_a, out_b, space, None if tag == MIXED else tag)

    def __repr__(self):
        return f"SpectralField(m_max={self.space.m_max}, n_max={self.space.n_max}, parity={self.parity_tag}, norm={self.norm():.6g})"


class SpectralSpace(BaseEstimator, TransformerMixin):
    """Truncated trig x eigenfunction basis with its quadrature grids.

    ``fit(basis, period)`` fixes the eigenbasis and the rational period.
    ``transform`` analyses grid samples into a :class:`SpectralField` and
    ``inverse_transform`` synthesises a field back onto the grid.

    Parameters
    ----------
    m_max, n_max : int
        Truncation in time frequency and eigenfunction index.
    dealias : bool
        Evaluate pointwise products on a 3/2-padded grid.
    """

    def __init__(self, m_max=15, n_max=10, dealias=True):
        self.m_max = m_max
        self.n_max = n_max
        self.dealias = dealias

    def fit(self, basis, period):
        check_positive_int(self.m_max, "m_max")
        check_positive_int(self.n_max, "n_max")
        if self.n_max > basis.n_max:
            raise ValueError(f"n_max={self.n_max} exceeds the eigenbasis size {basis.n_max}")
        n_x = basis.profile.grid_size
        if n_x - 1 < 4 * self.n_max:
            raise ValueError(
                f"under-resolved x grid: {n_x} points cannot resolve n_max={self.n_max} "
                f"(need at least {4 * self.n_max + 1})"
            )
        self.basis_ = basis
        self.period_ = period
        m = np.arange(self.m_max + 1)
        self.odd_rows = m % 2 == 1
        freq = np.array([float(period.frequency_sq(k)) for k in m])
        self.mu_ = basis.lambda_sq[None, : self.n_max] - freq[:, None]
        self.norm_factor_ = np.where(m == 0, 1.0 / np.sqrt(period.T), np.sqrt(2.0 / period.T))
        self.n_t_ = _time_points(self.m_max, period.p)
        self.__dict__.pop("grid_", None)
        self.__dict__.pop("fine_grid_", None)
        return self

    # grids are built on first use: spectrum-only callers never pay for them
    @cached_property
    def grid_(self):
        check_is_fitted(self, "basis_")
        return Grid(self, self.n_t_, self.basis_.profile.grid)

    @cached_property
    def fine_grid_(self):
        if not self.dealias:
            return self.grid_
        n_t = 3 * self.n_t_ // 2
        n_t += n_t % 2
        intervals = -(-3 * (self.basis_.profile.grid_size - 1) // 2)
        intervals += intervals % 2
        return Grid(self, n_t, np.linspace(0.0, np.pi, intervals + 1))

    @property
    def odd_size(self):
        return 2 * int(self.odd_rows.sum()) * self.n_max

    def odd_mu_vector(self):
        mu_odd = self.mu_[self.odd_rows].ravel()
        return np.concatenate([mu_odd, mu_odd])

    def odd_index(self):
        """(kind, m, n) label of every entry of an odd vector."""
        ms = np.flatnonzero(self.odd_rows)
        labels = [(m, n) for m in ms for n in range(1, self.n_max + 1)]
        return [("cos", int(m), n) for m, n in labels] + [("sin", int(m), n) for m, n in labels]

    def transform(self, X):
        check_is_fitted(self, "basis_")
        if isinstance(X, GridField):
            return analyze(X)
        grid = self.grid_ if np.shape(X) == self.grid_.shape else self.fine_grid_
        return analyze(GridField(np.asarray(X, dtype=float), grid))

    def inverse_transform(self, X):
        return synthesize(X).values


def mode_field(space, modes, parity_tag=None):
    """Field from ``(kind, m, n, amplitude)`` tuples, kind in {"cos", "sin"}."""
    field = SpectralField.zeros(space)
    for kind, m, n, amp in modes:
        if kind not in ("cos", "sin"):
            raise ValueError(f"mode kind must be 'cos' or 'sin', got {kind!r}")
        if not (0 <= m <= space.m_max and 1 <= n <= space.n_max):
            raise IndexError(f"mode (m={m}, n={n}) outside the truncation")
        if kind == "sin" and m == 0:
            raise ValueError("there is no sine mode at m = 0")
        (field.a if kind == "cos" else field.b)[m, n - 1] += amp
    return SpectralField(field.a, field.b, space, parity_tag)


def weighted_inner(y, z):
    """int u(x) y z dt dx: trapezoid in t, Simpson in x."""
    if y.grid is not z.grid:
        raise ValueError("grid mismatch in weighted_inner")
    return y.grid.integrate(y.values * z.values)


def synthesize(c, fine=False):
    """Grid samples of a spectral field (fine=True uses the padded grid)."""
    space = c.space
    grid = space.fine_grid_ if fine else space.grid_
    n = grid.n_t
    A = c.a @ grid.phi.T
    B = c.b @ grid.phi.T
    scale = np.where(np.arange(space.m_max + 1) == 0, n, n / 2.0) * space.norm_factor_
    Z = np.zeros((n // 2 + 1, grid.n_x), dtype=complex)
    Z[: space.m_max + 1] = scale[:, None] * (A - 1j * B)
    return GridField(np.fft.irfft(Z, n=n, axis=0), grid)


def analyze(g, space=None):
    """Project grid samples onto the truncated basis."""
    grid = g.grid
    space = space or _space_of(grid)
    if space.m_max >= grid.n_t // 2:
        raise ValueError(f"under-resolved time grid: n_t={grid.n_t} for m_max={space.m_max}")
    F = np.fft.rfft(g.values, axis=0)[: space.m_max + 1]
    factor = (space.norm_factor_ * grid.dt)[:, None]
    A = factor * F.real
    B = -factor * F.imag
    B[0] = 0.0
    return SpectralField(A @ grid.proj.T, B @ grid.proj.T, space)


def _space_of(grid):
    space = getattr(grid, "space", None)
    if space is None:
        raise ValueError("grid is not attached to a spectral space")
    return space


def project_parity(c, target):
    """Zero the coefficients of the complementary parity."""
    tag = _TARGETS.get(target)
    if tag is None:
        raise ValueError(f"target must be 'odd' or 'even', got {target!r}")
    keep = c.space.odd_rows if tag == ODD else ~c.space.odd_rows
    mask = keep[:, None].astype(float)
    return SpectralField(c.a * mask, c.b * mask, c.space, tag)


def apply_L(c):
    """Diagonal action mu_mn on every coefficient."""
    mu = c.space.mu_
    return SpectralField(c.a * mu, c.b * mu, c.space, c.parity_tag)


def _gamma_values(gamma, grid):
    if isinstance(gamma, SpectralField):
        return synthesize(gamma, fine=grid is gamma.space.fine_grid_).values
    if isinstance(gamma, GridField):
        if gamma.grid is not grid:
            raise ValueError("multiplier is sampled on a different grid")
        return gamma.values
    arr = np.asarray(gamma, dtype=float)
    if arr.shape != grid.shape:
        raise ValueError(f"multiplier must be a scalar, field, or array of shape {grid.shape}")
    return arr


def multiply(gamma, c):
    """Galerkin product gamma * c; constant gamma acts exactly."""
    if np.ndim(gamma) == 0 and not isinstance(gamma, (SpectralField, GridField)):
        return c * float(gamma)
    space = c.space
    fine = space.dealias
    y = synthesize(c, fine=fine)
    g = _gamma_values(gamma, y.grid)
    return analyze(GridField(g * y.values, y.grid), space)


@dataclass(frozen=True)
class NonlinearitySpec:
    """f(y) = c_lin y + c_sat y^3/(1+y^2) + c_osc sin(y) + e(t, x).

    The y-dependent part is odd in y and independent of t; the forcing e
    must lie in the odd (T/2-antiperiodic) subspace, so the whole map keeps
    that subspace invariant. ``symmetry="odd_f1_only"`` additionally
    requires zero forcing.
    """

    c_lin: float = 0.0
    c_sat: float = 0.0
    c_osc: float = 0.0
    forcing: SpectralField = None
    symmetry: str = "split_f1_f2"

    def __post_init__(self):
        for name in ("c_lin", "c_sat", "c_osc"):
            object.__setattr__(self, name, check_real(getattr(self, name), name))
        if self.symmetry not in ("odd_f1_only", "split_f1_f2"):
            raise ValueError(f"unknown symmetry declaration {self.symmetry!r}")
        if self.forcing is not None:
            even = ~self.forcing.space.odd_rows
            if self.forcing.a[even].any() or self.forcing.b[even].any():
                raise SymmetryError("forcing must be T/2-antiperiodic (odd m only)")
            if self.symmetry == "odd_f1_only" and self.forcing.norm() > 0:
                raise SymmetryError("symmetry 'odd_f1_only' requires zero forcing")

    @property
    def has_forcing(self):
        return self.forcing is not None and self.forcing.norm() > 0

    @property
    def asymptotic_slope(self):
        return self.c_lin + self.c_sat

    def value(self, y):
        """y-dependent part, pointwise."""
        y2 = y * y
        return self.c_lin * y + self.c_sat * y * y2 / (1.0 + y2) + self.c_osc * np.sin(y)

    def derivative(self, y):
        y2 = y * y
        return self.c_lin + self.c_sat * (y2 * y2 + 3.0 * y2) / (1.0 + y2) ** 2 + self.c_osc * np.cos(y)

    def slope_range(self):
        """Enclosure of f'(y) over all real y by interval arithmetic."""
        sat = sorted((0.0, self.c_sat * SAT_SLOPE_MAX))
        osc = abs(self.c_osc)
        return self.c_lin + sat[0] - osc, self.c_lin + sat[1] + osc

    def forcing_on(self, space):
        if self.forcing is None:
            return SpectralField.zeros(space, ODD)
        if self.forcing.space is space:
            return self.forcing
        return self.forcing.resized(space)

    def envelope(self, R, forcing_values=0.0):
        """Pointwise bound h_R >= |f| valid for |y| <= R."""
        return (abs(self.c_lin) + abs(self.c_sat)) * R + abs(self.c_osc) + np.abs(forcing_values)


def nemytskii(spec, y):
    """Pointwise f(t, x, y(t, x)) on the grid of ``y``."""
    if not np.all(np.isfinite(y.values)):
        raise ValueError("non-finite values in y")
    values = spec.value(y.values)
    if spec.forcing is not None:
        space = _space_of(y.grid)
        forcing = spec.forcing_on(space)
        values = values + synthesize(forcing, fine=y.grid is space.fine_grid_).values
    return GridField(values, y.grid)


def apply_nonlinearity(spec, c, dealias=None):
    """Galerkin image of the Nemytskii operator: analyze(f(synthesize(c)))."""
    space = c.space
    fine = space.dealias if dealias is None else dealias
    y = synthesize(c, fine=fine)
    return analyze(nemytskii(spec, y), space)


def jacobian_apply(spec, y, v):
    """Derivative of :func:`apply_nonlinearity` at ``y`` in direction ``v``: P[f'(y) v]."""
    space = y.space
    yg = synthesize(y, fine=space.dealias)
    return multiply(GridField(spec.derivative(yg.values), yg.grid), v)
