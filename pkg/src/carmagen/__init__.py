"""Generalized CARMA / Levy process toolkit.

Construction of the exponential B-spline machinery of pole/zero systems,
exact sample-path generation for Gaussian, compound-Poisson and alpha-stable
innovations (stable or not), and estimators that check generated statistics
against the closed-form predictions.
"""

from .errors import (
    CarmagenError,
    FactorizationFailure,
    OrderViolation,
    QuadratureFailure,
    RieszViolation,
    SignalTooShort,
    Unsupported,
)
from .system import PoleZeroSystem, build_system, rescale_system
from .expspline import (
    PiecewiseExpPoly,
    bspline_L,
    bspline_alpha,
    bspline_autocorr,
    eval_spline,
    green_function_eval,
)
from .filters import (
    FilterSpec,
    InterpolationFilter,
    continuous_autocorr,
    discrete_bspline_filter,
    interpolation_filter,
    localization_coeffs,
    power_spectrum,
    q_alpha,
    spectral_factorize,
)
from .inverse_ops import (
    BoundaryReport,
    apply_inverse_composite,
    apply_localization,
    first_order_inverse,
    regularized_inverse,
)
from .innovations import (
    AmplitudeLaw,
    CompoundPoissonInnovation,
    GaussianInnovation,
    InnovationDraw,
    InnovationSpec,
    SasInnovation,
    charfn_increment,
    charfn_sampled_process,
    draw_innovations,
    innovation_variance,
    levy_exponent,
    normal_amplitude,
    rescale_innovation,
    sas_standard,
)
from .generators import (
    Realization,
    generate_gaussian,
    generate_levy_oversampled,
    generate_mixed,
    generate_poisson,
)
from .stats import StatReport, empirical_autocorr, empirical_charfn, whiteness_check

__version__ = "0.1.0"

__all__ = [
    "AmplitudeLaw",
    "BoundaryReport",
    "CarmagenError",
    "CompoundPoissonInnovation",
    "FactorizationFailure",
    "FilterSpec",
    "GaussianInnovation",
    "InnovationDraw",
    "InnovationSpec",
    "InterpolationFilter",
    "OrderViolation",
    "PiecewiseExpPoly",
    "PoleZeroSystem",
    "QuadratureFailure",
    "Realization",
    "RieszViolation",
    "SasInnovation",
    "SignalTooShort",
    "StatReport",
    "Unsupported",
    "apply_inverse_composite",
    "apply_localization",
    "bspline_L",
    "bspline_alpha",
    "bspline_autocorr",
    "build_system",
    "charfn_increment",
    "charfn_sampled_process",
    "continuous_autocorr",
    "discrete_bspline_filter",
    "draw_innovations",
    "empirical_autocorr",
    "empirical_charfn",
    "eval_spline",
    "first_order_inverse",
    "generate_gaussian",
    "generate_levy_oversampled",
    "generate_mixed",
    "generate_poisson",
    "green_function_eval",
    "innovation_variance",
    "interpolation_filter",
    "levy_exponent",
    "localization_coeffs",
    "normal_amplitude",
    "power_spectrum",
    "q_alpha",
    "regularized_inverse",
    "rescale_innovation",
    "rescale_system",
    "sas_standard",
    "spectral_factorize",
    "whiteness_check",
    "__version__",
]
