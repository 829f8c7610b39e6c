"""
Test Core Model
Derived rates, sideband correction and configuration validation
"""

import json
import math
import sys
import os

import numpy as np
import pydantic
import pytest

# Add project root to Python path
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, project_root)
from app.models.state import GaussianState
from app.models.system import CavityParams, OscillatorParams, SamplingGrid, SystemConfig
from app.modules.physics.model import (
    sideband_correction,
    backaction_rate,
    cooperativity,
    shot_noise_psd,
    coupling_for_cooperativity,
    validate,
    config_hash,
)
from app.modules.physics.config_loader import (
    hz,
    config_from_dict,
    config_to_dict,
    load_config,
    save_config,
)
from app.modules.physics.presets import list_presets, load_preset, preset_dict
from app.core.exceptions import (
    ConfigValidationError,
    ModelValidityError,
    NoProbeLightError,
    RecordIOError,
    StepSizeError,
    UndefinedCooperativityError,
)
from app.core.logging import setup_logging, get_logger

setup_logging()
logger = get_logger(__name__)


def single_oscillator_dict(**osc_overrides):
    """Document for one 125 kHz oscillator on a 3 MHz grid"""
    osc = {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0}
    osc.update(osc_overrides)
    return {
        "cavity": {"kappa": 5e6, "nbar": 1e4, "epsilon": 1.0},
        "oscillators": [osc],
        "grid": {"fs": 3e6, "tf": 1e-3},
    }


def test_cooperativity_unit_example():
    """n̄ = 1 and g = κ = Γ give C = 4 when the sideband factor is negligible"""
    print("\n" + "=" * 60)
    print("TEST: Cooperativity unit example")
    print("=" * 60)

    cav = CavityParams(kappa=1.0, nbar=1.0)
    osc = OscillatorParams(omega=1e-6, gamma=1.0, g=1.0)
    C = cooperativity(osc, cav)
    print(f"✓ C = {C}")
    assert C == pytest.approx(4.0, rel=1e-9)
    assert backaction_rate(osc, cav) == pytest.approx(C * osc.gamma, rel=1e-12)

    # κ = Γ is outside the resolved-sideband regime
    with pytest.raises(ModelValidityError):
        sideband_correction(osc, cav)

    wide = CavityParams(kappa=1e3, nbar=1.0)
    osc = OscillatorParams(omega=1e-6, gamma=1.0, g=1e3)
    C = cooperativity(osc, wide)
    assert C == pytest.approx(4e3, rel=1e-9)
    g_eff, _ = sideband_correction(osc, wide)
    assert C * wide.kappa * osc.gamma / (4 * wide.nbar) == pytest.approx(g_eff ** 2, rel=1e-12)
    assert backaction_rate(osc, wide) == pytest.approx(C * osc.gamma, rel=1e-12)


def test_cooperativity_back_solve():
    """Coupling realized from C gives back C"""
    print("\n" + "=" * 60)
    print("TEST: Cooperativity back-solve")
    print("=" * 60)

    cav = CavityParams(kappa=hz(5e6), nbar=1e4)
    for C in (0.1, 3.0, 100.0):
        g = coupling_for_cooperativity(C, hz(125e3), hz(2e3), cav)
        osc = OscillatorParams(omega=hz(125e3), gamma=hz(2e3), g=g)
        assert cooperativity(osc, cav) == pytest.approx(C, rel=1e-12)
        print(f"✓ C = {C:g} -> g = {g / (2 * math.pi):.4g} Hz")


def test_undamped_cooperativity():
    """Γ = 0 has no cooperativity but a finite backaction rate"""
    print("\n" + "=" * 60)
    print("TEST: Undamped oscillator")
    print("=" * 60)

    cav = CavityParams(kappa=hz(5e6), nbar=1e4)
    osc = OscillatorParams(omega=hz(125e3), gamma=0.0, g=hz(1e3))
    with pytest.raises(UndefinedCooperativityError):
        cooperativity(osc, cav)
    with pytest.raises(UndefinedCooperativityError):
        coupling_for_cooperativity(1.0, osc.omega, 0.0, cav)
    assert backaction_rate(osc, cav) > 0
    print("✓ UndefinedCooperativityError raised, backaction rate finite")


def test_shot_noise_psd():
    """P_SN = κ/(8εn̄) with the unit example and ε scaling"""
    print("\n" + "=" * 60)
    print("TEST: Shot-noise PSD")
    print("=" * 60)

    kappa = hz(5e6)
    assert shot_noise_psd(CavityParams(kappa=kappa, nbar=kappa / 8)) == pytest.approx(1.0)
    full = shot_noise_psd(CavityParams(kappa=kappa, nbar=1e4, epsilon=1.0))
    half = shot_noise_psd(CavityParams(kappa=kappa, nbar=1e4, epsilon=0.5))
    assert half == pytest.approx(2 * full)

    with pytest.raises(NoProbeLightError):
        shot_noise_psd(CavityParams(kappa=kappa, nbar=0.0))
    print("✓ Unit PSD, efficiency scaling and NoProbeLightError")


def test_sideband_correction():
    """ω = 0, ω = κ and the default 125 kHz / 5 MHz case"""
    print("\n" + "=" * 60)
    print("TEST: Sideband correction")
    print("=" * 60)

    cav = CavityParams(kappa=hz(5e6), nbar=1e4)
    g = hz(1e3)

    g_eff, phi = sideband_correction(OscillatorParams(omega=0.0, gamma=hz(2e3), g=g), cav)
    assert (g_eff, phi) == (g, 0.0)

    g_eff, phi = sideband_correction(OscillatorParams(omega=cav.kappa, gamma=hz(2e3), g=g), cav)
    assert g_eff == pytest.approx(g / math.sqrt(2))
    assert phi == pytest.approx(math.pi / 4)

    g_eff, phi = sideband_correction(OscillatorParams(omega=hz(125e3), gamma=hz(2e3), g=g), cav)
    assert g_eff / g == pytest.approx(0.99968765, abs=1e-6)
    assert phi == pytest.approx(0.0249948, abs=1e-6)
    print(f"✓ 125 kHz: g_eff/g = {g_eff / g:.8f}, phi = {phi:.6f}")

    with pytest.raises(ModelValidityError):
        sideband_correction(OscillatorParams(omega=hz(125e3), gamma=hz(1e5), g=g), cav)
    print("✓ ModelValidityError for κ <= 100Γ")


def test_validate_derived_quantities():
    """Preset derived values, resolution report and idempotence"""
    print("\n" + "=" * 60)
    print("TEST: Validate derived quantities")
    print("=" * 60)

    config = load_preset("psd-two-mode")
    assert config.grid.nt == 10000
    assert config.derived.cooperativity[0] == pytest.approx(3.0, rel=1e-12)
    (entry,) = config.derived.resolution
    assert entry.delta_over_gamma == pytest.approx(5.0)
    assert all(config.derived.high_q)

    again = validate(config)
    assert again == config
    assert config_hash(again) == config_hash(config)
    print(f"✓ δ/Γ = {entry.delta_over_gamma:g}, validation idempotent")


def test_validate_rejects_bad_fields():
    """Bounds and the step-size guard"""
    print("\n" + "=" * 60)
    print("TEST: Validation errors")
    print("=" * 60)

    data = single_oscillator_dict()
    data["cavity"]["epsilon"] = -0.5
    with pytest.raises(ConfigValidationError) as info:
        config_from_dict(data)
    assert info.value.field == "cavity.epsilon"
    print(f"✓ {info.value}")

    data = single_oscillator_dict(nu=-1.0)
    with pytest.raises(ConfigValidationError):
        config_from_dict(data)

    data = single_oscillator_dict(g=1e3)
    with pytest.raises(ConfigValidationError):
        config_from_dict(data)

    data = single_oscillator_dict()
    data["grid"]["fs"] = 2e6
    with pytest.raises(StepSizeError):
        config_from_dict(data)
    print("✓ Negative ν, g+C together and low fs rejected")


def test_config_file_round_trip(tmp_path):
    """save_config/load_config keep the physical parameters"""
    print("\n" + "=" * 60)
    print("TEST: Config file round trip")
    print("=" * 60)

    config = config_from_dict(single_oscillator_dict())
    path = tmp_path / "system.json"
    save_config(config, path)

    document = json.loads(path.read_text())
    assert document["oscillators"][0]["omega"] == pytest.approx(125e3)

    loaded = load_config(path)
    assert loaded.oscillators[0].g == pytest.approx(config.oscillators[0].g, rel=1e-12)
    assert loaded.derived.cooperativity[0] == pytest.approx(3.0, rel=1e-9)
    assert config_to_dict(loaded)["grid"] == {"fs": 3e6, "tf": 1e-3}

    with pytest.raises(RecordIOError):
        load_config(tmp_path / "missing.json")
    print("✓ Round trip and missing-file error")


def test_presets_load():
    """Every named preset validates"""
    print("\n" + "=" * 60)
    print("TEST: Presets")
    print("=" * 60)

    for name in list_presets():
        config = load_preset(name)
        assert config.is_validated
        print(f"✓ {name}: {config.n_modes} oscillator(s), nt = {config.grid.nt}")

    spin = load_preset("spin-motion")
    assert spin.derived.cooperativity[0] is None
    assert load_preset("single-thermal", tf=5e-4).grid.nt == 2500

    with pytest.raises(ConfigValidationError):
        preset_dict("no-such-preset")


def test_models_are_frozen():
    """Configurations and states reject mutation"""
    print("\n" + "=" * 60)
    print("TEST: Frozen models")
    print("=" * 60)

    config = load_preset("single-thermal", tf=5e-4)
    with pytest.raises(pydantic.ValidationError):
        config.grid.fs = 1e6
    with pytest.raises(pydantic.ValidationError):
        config.oscillators[0].nu = 3.0

    state = GaussianState(mean=np.zeros(2), cov=0.5 * np.eye(2))
    with pytest.raises(pydantic.ValidationError):
        state.mean = np.ones(2)
    for model in (SystemConfig, CavityParams, OscillatorParams, SamplingGrid, GaussianState):
        assert model.model_config["frozen"], model.__name__
    print("✓ Assignment refused")


def run_all_tests():
    """Run all core model tests"""
    import tempfile
    from pathlib import Path

    print("\n" + "=" * 80)
    print(" " * 25 + "CORE MODEL TEST SUITE")
    print("=" * 80)

    try:
        test_cooperativity_unit_example()
        test_cooperativity_back_solve()
        test_undamped_cooperativity()
        test_shot_noise_psd()
        test_sideband_correction()
        test_validate_derived_quantities()
        test_validate_rejects_bad_fields()
        with tempfile.TemporaryDirectory() as tmp:
            test_config_file_round_trip(Path(tmp))
        test_presets_load()
        test_models_are_frozen()

        print("\n" + "=" * 80)
        print(" " * 30 + "ALL TESTS PASSED")
        print("=" * 80)

    except AssertionError as e:
        print(f"\n❌ Assertion failed: {e}")
        logger.error("Test assertion failed", exc_info=True)
        raise


if __name__ == "__main__":
    run_all_tests()
