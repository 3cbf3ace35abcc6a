"""Spectrum mu_mn = lambda_n^2 - (q m / p)^2 of the time-periodic wave operator.

The time period is T = 2 pi p / q. Odd time frequencies m span the
T/2-antiperiodic subspace; when p is even, every odd-m eigenvalue is isolated
because n p - m q is then a nonzero integer.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._validation import HypothesisError, ResonanceError, check_positive_int, check_real

__all__ = [
    "RationalPeriod",
    "OperatorSpectrum",
    "mu",
    "mu_exact",
    "exact_lambda_sq",
    "odd_spectrum",
    "even_spectrum",
    "consecutive_pair",
    "kernel_basis",
    "window_guard",
    "DEFAULT_KERNEL_TOL",
]

DEFAULT_KERNEL_TOL = 1e-6


@dataclass(frozen=True)
class RationalPeriod:
    """Time period T = 2 pi p / q with gcd(p, q) = 1."""

    p: int
    q: int

    def __post_init__(self):
        check_positive_int(self.p, "p")
        check_positive_int(self.q, "q")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p and q must be coprime, got p={self.p}, q={self.q}")

    @property
    def T(self):
        return 2.0 * np.pi * self.p / self.q

    @property
    def omega(self):
        """Base angular frequency q/p = 2 pi / T."""
        return self.q / self.p

    def frequency_sq(self, m):
        """(q m / p)^2 as an exact fraction."""
        return Fraction(self.q * m, self.p) ** 2

    def require_even(self):
        if self.p % 2:
            raise HypothesisError(
                f"the odd-subspace reduction needs p even (T = 2 pi p/q); got p={self.p}"
            )
        return self


def mu(basis, period, m, n):
    """Eigenvalue lambda_n^2 - (q m/p)^2 of the wave operator at mode (m, n)."""
    if not 1 <= n <= basis.n_max:
        raise IndexError(f"n={n} outside 1..{basis.n_max}")
    if m < 0:
        raise IndexError(f"m must be nonnegative, got {m}")
    return float(basis.lambda_sq[n - 1]) - float(period.frequency_sq(m))


def mu_exact(lambda_sq_n, period, m):
    """Exact mu for a rational eigenvalue ``lambda_sq_n``."""
    return Fraction(lambda_sq_n) - period.frequency_sq(m)


def exact_lambda_sq(profile, n_max):
    """Closed-form lambda_n^2 as fractions where known, else ``None``.

    Constant and (1 + x/pi)^2 coefficients have eta_u = 0, hence lambda_n^2 = n^2;
    exp(a x) has constant eta_u = a^2/4, hence lambda_n^2 = n^2 + a^2/4.
    """
    if profile.kind in ("constant", "square_polynomial"):
        shift = Fraction(0)
    elif profile.kind == "exponential":
        shift = Fraction(profile.params["a"]) ** 2 / 4
    else:
        return None
    return [Fraction(n * n) + shift for n in range(1, n_max + 1)]


@dataclass(frozen=True)
class OperatorSpectrum:
    """Truncated set of (m, n, mu, parity) sorted by mu."""

    m: np.ndarray
    n: np.ndarray
    mu: np.ndarray
    parity: str
    m_max: int
    n_max: int
    kernel_tol: float
    basis: object = field(repr=False, compare=False)
    period: RationalPeriod = None

    @property
    def entries(self):
        return [(int(m), int(n), float(v), self.parity) for m, n, v in zip(self.m, self.n, self.mu)]

    @property
    def min_abs_mu(self):
        return float(np.min(np.abs(self.mu)))

    @property
    def argmin_abs_mu(self):
        i = int(np.argmin(np.abs(self.mu)))
        return int(self.m[i]), int(self.n[i])

    def distinct_values(self):
        """Values grouped by multiplicity: list of (value, [(m, n), ...])."""
        groups = []
        for m, n, v in zip(self.m, self.n, self.mu):
            # compare against the first member so no group spans more than kernel_tol
            if groups and v - groups[-1][0][0] <= self.kernel_tol:
                groups[-1].append((float(v), int(m), int(n)))
            else:
                groups.append([(float(v), int(m), int(n))])
        return [
            (float(np.mean([g[0] for g in group])), [(g[1], g[2]) for g in group])
            for group in groups
        ]

    def __len__(self):
        return len(self.mu)


def _spectrum(basis, period, m_values, n_max, kernel_tol, parity):
    n_max = check_positive_int(n_max, "n_max")
    if n_max > basis.n_max:
        raise ValueError(f"n_max={n_max} exceeds the eigenbasis size {basis.n_max}")
    kernel_tol = check_real(kernel_tol, "kernel_tol", positive=True)
    m_values = np.asarray(m_values, dtype=int)
    freq = np.array([float(period.frequency_sq(m)) for m in m_values])
    values = basis.lambda_sq[None, :n_max] - freq[:, None]
    mm, nn = np.meshgrid(m_values, np.arange(1, n_max + 1), indexing="ij")
    order = np.argsort(values, axis=None, kind="stable")
    return (
        mm.ravel()[order],
        nn.ravel()[order],
        values.ravel()[order],
        kernel_tol,
    )


def odd_spectrum(basis, period, m_max, n_max, kernel_tol=DEFAULT_KERNEL_TOL):
    """All mu_mn with odd m <= m_max and n <= n_max, sorted by value."""
    period.require_even()
    m_max = check_positive_int(m_max, "m_max")
    m, n, values, tol = _spectrum(basis, period, np.arange(1, m_max + 1, 2), n_max, kernel_tol, "odd")
    spec = OperatorSpectrum(m, n, values, "odd", m_max, n_max, tol, basis, period)
    small = np.abs(values) <= tol
    if np.any(small):
        i = int(np.argmax(small))
        raise ResonanceError(
            f"odd-m eigenvalue mu({m[i]},{n[i]}) = {values[i]:.3e} is within kernel_tol of 0; "
            "this contradicts p even and signals an inaccurate eigen-solve",
            index=(int(m[i]), int(n[i])),
        )
    return spec


def even_spectrum(basis, period, m_max, n_max, kernel_tol=DEFAULT_KERNEL_TOL):
    """Even-m part of the spectrum (m = 0 included); diagnostics only."""
    m_max = check_positive_int(m_max, "m_max", minimum=0)
    m, n, values, tol = _spectrum(basis, period, np.arange(0, m_max + 1, 2), n_max, kernel_tol, "even")
    return OperatorSpectrum(m, n, values, "even", m_max, n_max, tol, basis, period)


def window_guard(spec, level, halfwidth):
    """Check that no mode outside the window has |mu - level| <= halfwidth.

    For odd m and p even, |n p - m q| >= 1, so
    |mu_mn| >= (n + q m / p) / p - |kappa|/pi - max|d_n|, with d_n the
    eigenvalue defect lambda_n^2 - n^2 - kappa/pi (estimated on the computed
    eigenvalues). Returns the margin; raises ``ValueError`` when it is not
    positive.
    """
    if spec.parity != "odd":
        raise ValueError("the window guard applies to the odd spectrum only")
    period, basis = spec.period, spec.basis
    p, q = period.p, period.q
    kap = basis.profile.kappa() / np.pi
    n = np.arange(1, basis.n_max + 1)
    defect = np.max(np.abs(basis.lambda_sq - n**2 - kap))
    c0 = abs(kap) + defect
    m_next = spec.m_max + 1 if spec.m_max % 2 == 0 else spec.m_max + 2
    reach = min(spec.n_max + 1 + q / p, 1 + q * m_next / p)
    margin = reach / p - c0 - (abs(level) + halfwidth)
    if margin <= 0:
        raise ValueError(
            f"truncation window (m_max={spec.m_max}, n_max={spec.n_max}) is too small to certify "
            f"the spectrum within {halfwidth:g} of {level:g}; enlarge it"
        )
    return margin


def consecutive_pair(spec, level, guard=True):
    """Adjacent distinct spectral values (lower <= level < upper)."""
    if spec.parity != "odd":
        raise ValueError("consecutive_pair is defined on the odd spectrum")
    level = check_real(level, "level")
    values = np.array([v for v, _ in spec.distinct_values()])
    hit = np.abs(values - level) <= spec.kernel_tol
    if np.any(hit):
        raise ValueError(f"level {level:g} coincides with spectral value {values[hit][0]:.17g}")
    below = values[values <= level]
    above = values[values > level]
    if below.size == 0 or above.size == 0:
        raise ValueError(f"spectrum window does not bracket level {level:g}")
    lower, upper = float(below.max()), float(above.min())
    if guard:
        window_guard(spec, level, max(level - lower, upper - level))
    return lower, upper


def kernel_basis(spec, value):
    """Index pairs (m, n) with |mu_mn - value| <= kernel_tol.

    Each pair with m >= 1 contributes the two functions
    T_m phi_n cos(q m t/p) and T_m phi_n sin(q m t/p).
    """
    value = check_real(value, "value")
    hit = np.abs(spec.mu - value) <= spec.kernel_tol
    return sorted((int(m), int(n)) for m, n in zip(spec.m[hit], spec.n[hit]))
