"""
Core Model
Physical parameters, derived quantities and validation
"""

from app.modules.physics.model import (
    backaction_rate,
    config_hash,
    cooperativity,
    coupling_for_cooperativity,
    ensure_validated,
    require_shot_noise,
    resolution_report,
    shot_noise_psd,
    sideband_correction,
    thermal_rate,
    validate,
)
from app.modules.physics.config_loader import config_from_dict, config_to_dict, hz, load_config, save_config
from app.modules.physics.presets import list_presets, load_preset, preset_dict

__all__ = [
    "backaction_rate",
    "config_hash",
    "cooperativity",
    "coupling_for_cooperativity",
    "ensure_validated",
    "require_shot_noise",
    "resolution_report",
    "shot_noise_psd",
    "sideband_correction",
    "thermal_rate",
    "validate",
    "config_from_dict",
    "config_to_dict",
    "hz",
    "load_config",
    "save_config",
    "list_presets",
    "load_preset",
    "preset_dict",
]
