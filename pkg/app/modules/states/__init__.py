"""
Gaussian States
Constructors, sampling and physicality diagnostics
"""

from app.modules.states.gaussian import (
    is_physical,
    log_negativity,
    mode_occupation,
    sample,
    single_mode_squeezed,
    squeezing_db,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_state,
    two_mode_squeezed,
    vacuum_state,
)
from app.modules.states.state_spec import parse_state_spec

__all__ = [
    "is_physical",
    "log_negativity",
    "mode_occupation",
    "sample",
    "single_mode_squeezed",
    "squeezing_db",
    "symplectic_eigenvalues",
    "symplectic_form",
    "thermal_state",
    "two_mode_squeezed",
    "vacuum_state",
    "parse_state_spec",
]
