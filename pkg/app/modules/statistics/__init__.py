"""
Noise Statistics
Response correlations, estimator bias covariances and state inference
"""

from app.modules.statistics.broadened import broadened_second_moments
from app.modules.statistics.inference import (
    bootstrap_se,
    closure_z_scores,
    infer_state_cov,
    physicality_violations,
    sample_covariance,
    wishart_se,
)
from app.modules.statistics.kernels import backaction_kernel, kernel_integral, quadratic_form, response_correlation
from app.modules.statistics.mean_square import (
    MeanSquareAccumulator,
    compare_mean_square,
    empirical_mean_square,
    mean_square_signal,
    mean_square_table,
)
from app.modules.statistics.noise_covariance import (
    added_occupation,
    backaction_cov,
    cross_error,
    diffusion_cov_by_quadrature,
    noise_covariance_set,
    shot_noise_cov,
    thermal_cov,
)

__all__ = [
    "broadened_second_moments",
    "bootstrap_se",
    "closure_z_scores",
    "infer_state_cov",
    "physicality_violations",
    "sample_covariance",
    "wishart_se",
    "backaction_kernel",
    "kernel_integral",
    "quadratic_form",
    "response_correlation",
    "MeanSquareAccumulator",
    "compare_mean_square",
    "empirical_mean_square",
    "mean_square_signal",
    "mean_square_table",
    "added_occupation",
    "backaction_cov",
    "cross_error",
    "diffusion_cov_by_quadrature",
    "noise_covariance_set",
    "shot_noise_cov",
    "thermal_cov",
]
