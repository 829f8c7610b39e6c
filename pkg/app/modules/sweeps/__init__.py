"""
Sweeps
Parameter sweeps of the analytic added noise, run in a worker pool
"""

from app.modules.sweeps.runner import apply_point, argmin_row, check_axes, run_points
from app.modules.sweeps.sql import exp_added_noise, mc_added_noise, sweep_single_sql
from app.modules.sweeps.two_mode import optimal_cooperativity, sweep_two_mode, two_mode_point

__all__ = [
    "apply_point",
    "argmin_row",
    "check_axes",
    "run_points",
    "exp_added_noise",
    "mc_added_noise",
    "sweep_single_sql",
    "optimal_cooperativity",
    "sweep_two_mode",
    "two_mode_point",
]
