"""Input validation helpers shared by the estimators."""

import numbers

import numpy as np


class VarwaveError(Exception):
    """Base class for errors raised by this package."""


class HypothesisError(VarwaveError, ValueError):
    """A structural hypothesis of the problem is violated (e.g. odd p)."""


class ResonanceError(VarwaveError, ArithmeticError):
    """A truncated operator has a (near-)zero diagonal entry."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(VarwaveError, RuntimeError):
    """An iterative method failed to converge."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = path if path is not None else []


class SymmetryError(VarwaveError, RuntimeError):
    """The nonlinearity left the odd subspace during a solve."""


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if positive and value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_finite_array(values, name, ndim=None, shape=None):
    arr = np.asarray(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} must have shape {tuple(shape)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_in_interval(x, lo, hi, name="x"):
    """Raise unless every entry of ``x`` lies in ``[lo, hi]``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < lo) or np.any(arr > hi) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must lie in [{lo}, {hi}]")
    return arr
