"""Exact laws, normal-approximation bounds, and rare-event rates for
lattice urn processes driven by bounded random-walk kernels."""

from ._core import (
    BudgetError,
    IncrementDistribution,
    LatticePmf,
    RateFunctionResult,
    be_bound_1d,
    be_report,
    compound_poisson_pmf,
    compound_poisson_sample,
    exact_pmf,
    gauss_ratio,
    harmonic_tail,
    kolmogorov_distance_1d,
    lambda_n,
    log_product_pi,
    multivariate_sup_distance,
    rate_function,
    rate_function_closed,
    rate_properties,
    rate_regression,
    rho_moments_1d,
    rho_moments_d,
    sample_z,
    sigma_n_matrix,
    std_normal_cdf,
    tail_exponent_report,
    tilted_tail_mc,
)

PRESETS = ("det1d", "ssrw1d", "ne2d")

__all__ = [
    "BudgetError",
    "IncrementDistribution",
    "LatticePmf",
    "PRESETS",
    "RateFunctionResult",
    "be_bound_1d",
    "be_report",
    "compound_poisson_pmf",
    "compound_poisson_sample",
    "exact_pmf",
    "gauss_ratio",
    "harmonic_tail",
    "kolmogorov_distance_1d",
    "lambda_n",
    "log_product_pi",
    "multivariate_sup_distance",
    "rate_function",
    "rate_function_closed",
    "rate_properties",
    "rate_regression",
    "rho_moments_1d",
    "rho_moments_d",
    "sample_z",
    "sigma_n_matrix",
    "std_normal_cdf",
    "tail_exponent_report",
    "tilted_tail_mc",
]
