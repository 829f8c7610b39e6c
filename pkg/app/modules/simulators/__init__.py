"""
Simulator
Stochastic trajectories, homodyne records and spectra
"""

from app.modules.simulators.simulator import (
    iter_ensemble,
    measured_quadratures,
    run_ensemble,
    sample_frequencies,
    shot_streams,
    simulate_shot,
    simulate_trajectory,
    stationary_occupation,
    synthesize_signal,
)
from app.modules.simulators.spectral import analytic_psd, estimate_config_psd, estimate_psd

__all__ = [
    "iter_ensemble",
    "measured_quadratures",
    "run_ensemble",
    "sample_frequencies",
    "shot_streams",
    "simulate_shot",
    "simulate_trajectory",
    "stationary_occupation",
    "synthesize_signal",
    "analytic_psd",
    "estimate_config_psd",
    "estimate_psd",
]
