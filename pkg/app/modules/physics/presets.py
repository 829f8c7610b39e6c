"""
Named Configurations
Parameter sets of the published simulations and experiment, in Hz
"""

import copy
from typing import Any, Dict, List

from app.models.system import SystemConfig
from app.modules.physics.config_loader import config_from_dict
from app.core.exceptions import ConfigValidationError

# Simulation cavity: only C, ω, Γ, ν are fixed by the studies, κ and n̄ are free
DEFAULT_CAVITY = {"kappa": 5e6, "nbar": 1e4, "epsilon": 1.0}
DEFAULT_GRID = {"fs": 5e6, "tf": 2e-3}

PRESETS: Dict[str, Dict[str, Any]] = {
    # Two resolved oscillators for the normalized PSD demonstration
    "psd-two-mode": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0, "label": "m1"},
            {"omega": 135e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0, "label": "m2"},
        ],
        "grid": DEFAULT_GRID,
    },
    # Single thermal oscillator, OLS retrodiction
    "single-thermal": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0},
        ],
        "grid": DEFAULT_GRID,
    },
    # Zero-temperature single oscillator; the SQL sweep overrides C
    "single-sql": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 0.0, "cooperativity": 1.0},
        ],
        "grid": DEFAULT_GRID,
    },
    # Single oscillator at high cooperativity for squeezed-state inference
    "single-squeezed": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 20.0},
        ],
        "grid": DEFAULT_GRID,
    },
    # Two-mode squeezed state, second oscillator with negative mass
    "tmss": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 5.3, "label": "m1"},
            {"omega": -135e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 5.3, "label": "m2"},
        ],
        "grid": DEFAULT_GRID,
    },
    # Two oscillators at zero temperature separated by δ (set by the sweep)
    "two-mode-resolution": {
        "cavity": DEFAULT_CAVITY,
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 0.0, "cooperativity": 1.0, "label": "m1"},
            {"omega": 145e3, "gamma": 2e3, "nu": 0.0, "cooperativity": 1.0, "label": "m2"},
        ],
        "grid": {"fs": 4.6e6, "tf": 1e-3},
    },
    # Collective spin (negative mass, undamped) and center-of-mass motion
    "spin-motion": {
        "cavity": {"kappa": 10e6, "nbar": 2.6, "epsilon": 0.5},
        "oscillators": [
            {"omega": -111e3, "gamma": 0.0, "g": 18e3, "sigma": 0.2e3, "nu": 0.0, "label": "spin"},
            {"omega": 95e3, "gamma": 2.4e3, "g": 27e3, "sigma": 0.4e3, "nu": 2.7, "label": "motion"},
        ],
        "grid": {"fs": 2.5e6, "tf": 1e-3},
    },
}


def list_presets() -> List[str]:
    """Names of the available presets"""
    return sorted(PRESETS)


def preset_dict(name: str) -> Dict[str, Any]:
    """Deep copy of a preset document, for editing before parsing"""
    if name not in PRESETS:
        raise ConfigValidationError("preset", f"one of {', '.join(list_presets())}", name)
    return copy.deepcopy(PRESETS[name])


def load_preset(name: str, **grid_overrides) -> SystemConfig:
    """
    Validated SystemConfig for a named preset

    Args:
        name: Preset name
        **grid_overrides: Optional `fs`/`tf` replacements

    Returns:
        SystemConfig: Validated configuration
    """
    data = preset_dict(name)
    data["grid"].update(grid_overrides)
    return config_from_dict(data)
