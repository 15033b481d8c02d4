"""Screened-Poisson Green's function on a spherical shell.

Evaluation routes: split Legendre series (double or double-double), direct
truncated series, adaptive quadrature of the integral form, and closed forms
at the antipode and equator.  On top of the kernel sit spherical-harmonic
and convolution solvers for the screened Poisson equation itself.
"""

from .geometry import (
    BetaImaginary,
    DegenerateSeparation,
    EvalPoint,
    InvalidParams,
    ShellParams,
    SphericalPoint,
    central_angle,
    default_radius_km,
    make_params,
)
from .highprec import DDReal, dd_add, dd_constants, dd_div, dd_from_double, dd_mul, dd_sub, dd_to_double
from .integral import (
    DomainError,
    NoConvergence,
    QuadratureSpec,
    complex_log_gamma,
    green_antipode,
    green_equator,
    green_quadrature,
)
from .legendre import (
    ArgOutOfRange,
    LegendreSweep,
    generating_function_check,
    legendre_all,
    legendre_stream,
    partial_sum_bound_scan,
)
from .series import (
    GreenResult,
    Singular,
    TruncationPolicy,
    choose_truncation,
    convergence_crossings,
    error_curve,
    g_star,
    green_direct,
    green_split,
    loglog_slope,
    screened_minus_log_limit,
    split_values,
)
from .spectral import (
    HarmonicCoeffs,
    SphereField,
    SphereGrid,
    UnderResolved,
    analyze,
    kernel_table,
    l2_discrepancy,
    norm_assoc_legendre,
    solve_convolution,
    solve_spectral,
    synthesize,
)

__version__ = "0.1.0"
