"""
Filters
Response functions, matched-filter designers and estimate application
"""

from app.modules.filters.banks import (
    avg_filters,
    build_bank,
    estimate,
    estimate_many,
    exp_filters,
    filter_spectrum,
    gls_filters,
    notch_frequency,
    ols_filters,
    raw_outputs,
)
from app.modules.filters.noise_matrix import choose_decimation, noise_matrix, suggest_decimation
from app.modules.filters.optimal import (
    analytic_exp_added_noise,
    auto_gammas,
    optimal_gamma,
    optimal_gamma_from_rates,
    sql_floor,
)
from app.modules.filters.response import response, response_rows, riemann_sum, signal_response

__all__ = [
    "avg_filters",
    "build_bank",
    "estimate",
    "estimate_many",
    "exp_filters",
    "filter_spectrum",
    "gls_filters",
    "notch_frequency",
    "ols_filters",
    "raw_outputs",
    "choose_decimation",
    "noise_matrix",
    "suggest_decimation",
    "analytic_exp_added_noise",
    "auto_gammas",
    "optimal_gamma",
    "optimal_gamma_from_rates",
    "sql_floor",
    "response",
    "response_rows",
    "riemann_sum",
    "signal_response",
]
