"""Spectral Galerkin tools for time-periodic solutions of the
variable-coefficient wave equation u(x) y_tt - (u(x) y_x)_x = f(t, x, y)
on [0, pi] with Dirichlet conditions in x.
"""

from ._validation import ConvergenceError, HypothesisError, ResonanceError, SymmetryError, VarwaveError
from .coefficient import CoefficientProfile, eta_u, kappa
from .function_space import (
    EVEN,
    MIXED,
    ODD,
    Grid,
    GridField,
    NonlinearitySpec,
    SpectralField,
    SpectralSpace,
    analyze,
    apply_L,
    apply_nonlinearity,
    jacobian_apply,
    mode_field,
    multiply,
    nemytskii,
    project_parity,
    synthesize,
    weighted_inner,
)
from .solver import (
    PeriodicSolver,
    ProbeReport,
    SolveConfig,
    SolveReport,
    apriori_bound,
    clamp_radius,
    clamp_slope_g,
    continuation_solve,
    random_odd_field,
    resolvent_apply,
    uniqueness_probe,
)
from .sturm_liouville import EigenBasis, SturmLiouvilleSolver, asymptotics_report, solve_eigenbasis
from .verification import (
    NonresonanceReport,
    SlopeCheck,
    check_global_slopes,
    check_nonresonance,
    estimate_delta,
    largest_admissible_margin,
    spectral_residual,
    weak_residual,
)
from .wave_spectrum import (
    OperatorSpectrum,
    RationalPeriod,
    consecutive_pair,
    even_spectrum,
    kernel_basis,
    mu,
    odd_spectrum,
    window_guard,
)

__version__ = "0.1.0"
