"""The variable coefficient u(x) of the wave operator and its Liouville potential.

A profile knows u, u' and u'' on [0, pi]. From these it derives the potential

    eta_u = u''/(2u) - (u'/u)**2 / 4

of the Liouville normal form and its integral ``kappa`` over [0, pi].
"""

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from ._validation import check_finite_array, check_in_interval, check_positive_int, check_real

__all__ = ["CoefficientProfile", "eta_u", "kappa", "MIN_GRID_SIZE"]

MIN_GRID_SIZE = 129
KINDS = ("constant", "exponential", "square_polynomial", "user_sampled")


class CoefficientProfile:
    """Strictly positive C^2 coefficient u(x) on [0, pi].

    Use the named constructors :meth:`constant`, :meth:`exponential`,
    :meth:`square_polynomial`, :meth:`from_samples` or :meth:`from_table`.
    Instances are immutable.

    Parameters
    ----------
    kind : str
        One of ``"constant"``, ``"exponential"``, ``"square_polynomial"``,
        ``"user_sampled"``.
    params : dict
        Kind-specific parameters (``c`` for constant, ``a`` for exponential,
        ``u``/``du``/``ddu`` sample arrays for user-sampled profiles).
    grid_size : int
        Number of uniform quadrature points on [0, pi].
    """

    def __init__(self, kind, params=None, grid_size=513):
        if kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {KINDS}")
        params = dict(params or {})
        grid_size = check_positive_int(grid_size, "grid_size", minimum=MIN_GRID_SIZE)

        if kind == "constant":
            params["c"] = check_real(params.get("c", 1.0), "c")
        elif kind == "exponential":
            params["a"] = check_real(params.get("a", 0.0), "a")
        elif kind == "user_sampled":
            arrays = [check_finite_array(params.get(key), key, ndim=1) for key in ("u", "du", "ddu")]
            if len({len(a) for a in arrays}) != 1:
                raise ValueError("u, du and ddu samples must have equal length")
            if len(arrays[0]) < 4:
                raise ValueError("user-sampled profile needs at least 4 samples")
            if np.any(arrays[0] <= 0):
                raise ValueError("coefficient u must be strictly positive at every sample")
            xs = np.linspace(0.0, np.pi, len(arrays[0]))
            for key, arr in zip(("u", "du", "ddu"), arrays):
                arr.setflags(write=False)
                params[key] = arr
            self._splines = tuple(CubicSpline(xs, arr) for arr in arrays)

        self.kind = kind
        self.params = params
        self.grid_size = grid_size
        self.grid = np.linspace(0.0, np.pi, grid_size)
        self.grid.setflags(write=False)

        u_grid = self.u(self.grid)
        if not np.all(np.isfinite(u_grid)) or np.any(u_grid <= 0):
            raise ValueError(f"coefficient u must be strictly positive on [0, pi] ({self!r})")

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, c=1.0, grid_size=513):
        return cls("constant", {"c": c}, grid_size)

    @classmethod
    def exponential(cls, a, grid_size=513):
        """u(x) = exp(a x)."""
        return cls("exponential", {"a": a}, grid_size)

    @classmethod
    def square_polynomial(cls, grid_size=513):
        """u(x) = (1 + x/pi)**2, for which eta_u vanishes identically."""
        return cls("square_polynomial", {}, grid_size)

    @classmethod
    def from_samples(cls, u, du, ddu, grid_size=None):
        """Profile from samples of u, u', u'' on a uniform grid over [0, pi]."""
        u = np.asarray(u, dtype=float)
        if grid_size is None:
            grid_size = max(len(u), MIN_GRID_SIZE)
        return cls("user_sampled", {"u": u, "du": du, "ddu": ddu}, grid_size)

    @classmethod
    def from_table(cls, path, grid_size=None):
        """Read a whitespace separated 3-column table (u, u', u'')."""
        table = np.loadtxt(path, ndmin=2)
        if table.shape[1] != 3:
            raise ValueError(f"{path}: expected 3 columns (u, du, ddu), got {table.shape[1]}")
        return cls.from_samples(table[:, 0], table[:, 1], table[:, 2], grid_size=grid_size)

    # -- evaluation ---------------------------------------------------------
    def _derivatives(self, x):
        x = check_in_interval(x, 0.0, np.pi)
        if self.kind == "constant":
            c = self.params["c"]
            return np.full_like(x, c), np.zeros_like(x), np.zeros_like(x)
        if self.kind == "exponential":
            a = self.params["a"]
            e = np.exp(a * x)
            return e, a * e, a * a * e
        if self.kind == "square_polynomial":
            s = 1.0 + x / np.pi
            return s * s, 2.0 * s / np.pi, np.full_like(x, 2.0 / np.pi**2)
        return tuple(spline(x) for spline in self._splines)

    def u(self, x):
        return self._derivatives(x)[0]

    def du(self, x):
        return self._derivatives(x)[1]

    def ddu(self, x):
        return self._derivatives(x)[2]

    def eta(self, x):
        u, du, ddu = self._derivatives(x)
        if np.any(u <= 0):
            raise ValueError("coefficient u is not positive at the requested points")
        r = du / u
        return 0.5 * ddu / u - 0.25 * r * r

    def kappa(self):
        """Integral of eta_u over [0, pi] by composite Simpson on the profile grid."""
        return float(simpson(self.eta(self.grid), x=self.grid))

    def with_grid_size(self, grid_size):
        return CoefficientProfile(self.kind, self.params, grid_size)

    def to_dict(self):
        out = {"kind": self.kind, "grid_size": self.grid_size}
        for key, value in self.params.items():
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
        return out

    def __repr__(self):
        shown = {k: v for k, v in self.params.items() if not isinstance(v, np.ndarray)}
        return f"CoefficientProfile(kind={self.kind!r}, params={shown}, grid_size={self.grid_size})"


def eta_u(profile, x):
    """Liouville potential eta_u(x) = u''/(2u) - (u'/u)^2/4."""
    value = profile.eta(x)
    return float(value) if np.ndim(value) == 0 else value


def kappa(profile):
    return profile.kappa()
