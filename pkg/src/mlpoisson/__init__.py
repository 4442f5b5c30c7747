"""Generalized fractional Poisson distributions on the two-parameter
Mittag-Leffler function, with exact Bell/Stirling moment machinery, the
standard fractional Poisson distribution as a reference, and a fitting
engine between the two families.
"""

from .combinatorics import StirlingTable, bell_coefficients, bell_polynomial, stirling2
from .distributions import (
    GfpdParams,
    MomentVector,
    PmfTable,
    SfpdParams,
    ValidityResult,
    gfpd_asymptotic_moments,
    gfpd_mean_variance,
    gfpd_pmf,
    gfpd_pmf_table,
    gfpd_raw_moments,
    gfpd_validity_check,
    sfpd_mean_variance,
    sfpd_pmf,
    sfpd_pmf_table,
)
from .errors import (
    InvalidDistribution,
    InvalidParams,
    MlPoissonError,
    NoSolution,
    NonConvergence,
    NotConverged,
    OutOfRange,
    PrecisionExhausted,
)
from .fitting import (
    ALPHA_S_SWEEP,
    FitConfig,
    FitResult,
    fit_least_squares,
    fit_moment_match,
    fit_table1,
    fit_to_pmf,
)
from .special_functions import (
    DEFAULT_CONTROL,
    AsymptoticValue,
    MLParams,
    ScaledSums,
    SeriesControl,
    ml_asymptotic,
    ml_derivative,
    ml_eval,
    ml_eval_signed_log,
    ml_factorial_sums,
    reciprocal_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # types
    "MLParams", "SeriesControl", "DEFAULT_CONTROL", "AsymptoticValue", "ScaledSums",
    "StirlingTable", "GfpdParams", "SfpdParams", "PmfTable", "MomentVector",
    "ValidityResult", "FitConfig", "FitResult", "ALPHA_S_SWEEP",
    # special functions
    "reciprocal_gamma", "ml_eval", "ml_eval_signed_log", "ml_derivative",
    "ml_asymptotic", "ml_factorial_sums",
    # combinatorics
    "stirling2", "bell_coefficients", "bell_polynomial",
    # distributions
    "gfpd_pmf", "gfpd_pmf_table", "gfpd_raw_moments", "gfpd_mean_variance",
    "gfpd_asymptotic_moments", "gfpd_validity_check",
    "sfpd_pmf", "sfpd_pmf_table", "sfpd_mean_variance",
    # fitting
    "fit_least_squares", "fit_moment_match", "fit_table1", "fit_to_pmf",
    # errors
    "MlPoissonError", "InvalidParams", "NonConvergence", "OutOfRange",
    "InvalidDistribution", "PrecisionExhausted", "NoSolution", "NotConverged",
]
