"""
Configuration File Loader
Parses the JSON system description (frequencies in Hz) into SystemConfig
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, Union

from app.models.system import CavityParams, OscillatorParams, SamplingGrid, SystemConfig
from app.modules.physics.model import coupling_for_cooperativity, validate
from app.core.exceptions import ConfigValidationError, RecordIOError
from app.core.logging import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi

# Fields given in Hz at the file boundary and stored in rad/s
_OSCILLATOR_RATE_FIELDS = ("omega", "gamma", "g", "sigma", "extra_diffusion")


def hz(value: float) -> float:
    """Convert a frequency in Hz to rad/s (value·2π)"""
    return float(value) * TWO_PI


def _require(section: Dict[str, Any], key: str, where: str) -> Any:
    if key not in section:
        raise ConfigValidationError(f"{where}.{key}", "required field")
    return section[key]


def _parse_cavity(data: Dict[str, Any]) -> CavityParams:
    return CavityParams(
        kappa=hz(_require(data, "kappa", "cavity")),
        nbar=float(_require(data, "nbar", "cavity")),
        epsilon=float(data.get("epsilon", 1.0)),
        detuning=hz(data.get("detuning", 0.0)),
    )


def _parse_oscillator(data: Dict[str, Any], index: int, cavity: CavityParams) -> OscillatorParams:
    where = f"oscillators[{index}]"
    omega = hz(_require(data, "omega", where))
    gamma = hz(data.get("gamma", 0.0))

    if "g" in data and "cooperativity" in data:
        raise ConfigValidationError(f"{where}", "give either g or cooperativity, not both")
    if "cooperativity" in data:
        C = float(data["cooperativity"])
        if C < 0:
            raise ConfigValidationError(f"{where}.cooperativity", "cooperativity >= 0", C)
        g = coupling_for_cooperativity(C, omega, gamma, cavity)
        logger.debug(f"{where}: C={C:g} realized with g={g / TWO_PI:.6g} Hz")
    else:
        g = hz(_require(data, "g", where))

    return OscillatorParams(
        omega=omega,
        gamma=gamma,
        g=g,
        nu=float(data.get("nu", 0.0)),
        sigma=hz(data.get("sigma", 0.0)),
        extra_diffusion=hz(data.get("extra_diffusion", 0.0)),
        label=data.get("label"),
    )


def config_from_dict(data: Dict[str, Any], run_validation: bool = True) -> SystemConfig:
    """
    Build a SystemConfig from the JSON document structure

    Args:
        data: Mapping with `cavity`, `oscillators` and `grid` sections
        run_validation: Validate and cache derived quantities

    Returns:
        SystemConfig: Parsed configuration
    """
    for section in ("cavity", "oscillators", "grid"):
        if section not in data:
            raise ConfigValidationError(section, "required section")

    cavity = _parse_cavity(data["cavity"])
    oscillators = [
        _parse_oscillator(osc, i, cavity) for i, osc in enumerate(data["oscillators"])
    ]
    grid_data = data["grid"]
    grid = SamplingGrid(
        fs=float(_require(grid_data, "fs", "grid")),
        tf=float(_require(grid_data, "tf", "grid")),
    )

    config = SystemConfig(cavity=cavity, oscillators=oscillators, grid=grid)
    return validate(config) if run_validation else config


def config_to_dict(config: SystemConfig) -> Dict[str, Any]:
    """Inverse of config_from_dict with rates back in Hz"""
    cav = config.cavity
    return {
        "cavity": {
            "kappa": cav.kappa / TWO_PI,
            "nbar": cav.nbar,
            "epsilon": cav.epsilon,
        },
        "oscillators": [
            {
                **{name: getattr(osc, name) / TWO_PI for name in _OSCILLATOR_RATE_FIELDS},
                "nu": osc.nu,
                **({"label": osc.label} if osc.label else {}),
            }
            for osc in config.oscillators
        ],
        "grid": {"fs": config.grid.fs, "tf": config.grid.tf},
    }


def load_config(path: Union[str, Path]) -> SystemConfig:
    """
    Load and validate a configuration file

    Args:
        path: JSON file path

    Returns:
        SystemConfig: Validated configuration
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise RecordIOError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise RecordIOError(f"config file is not valid JSON: {path}: {e}")

    config = config_from_dict(data)
    logger.info(f"✓ Loaded config {path.name}: {config.n_modes} oscillator(s), nt={config.grid.nt}")
    return config


def save_config(config: SystemConfig, path: Union[str, Path]):
    """Write a configuration as JSON in Hz units"""
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2), encoding="utf-8")
