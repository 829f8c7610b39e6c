"""
Test Noise Statistics
Sample covariances, bias removal, broadened moments and the retrodiction pipeline
"""

import math
import sys
import os

import numpy as np
import pytest

# Add project root to Python path
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, project_root)
from app.models.state import GaussianState
from app.models.statistics import NoiseCovarianceSet
from app.modules.physics.config_loader import config_from_dict
from app.modules.physics.presets import load_preset
from app.modules.filters.banks import avg_filters, estimate_many, ols_filters
from app.modules.simulators.simulator import run_ensemble
from app.modules.states.gaussian import mode_occupation, squeezing_db, thermal_state
from app.modules.states.state_spec import parse_state_spec
from app.modules.statistics.broadened import broadened_second_moments
from app.modules.statistics.inference import (
    bootstrap_se,
    closure_z_scores,
    infer_state_cov,
    physicality_violations,
    sample_covariance,
    wishart_se,
)
from app.modules.statistics.mean_square import empirical_mean_square, mean_square_signal
from app.modules.statistics.noise_covariance import added_occupation, cross_error, noise_covariance_set
from app.services.retrodiction import RetrodictionPipeline
from app.core.exceptions import ConfigValidationError, InsufficientSamplesError
from app.core.logging import setup_logging, get_logger

setup_logging()
logger = get_logger(__name__)


def single_config(sigma=0.0, tf=1e-3):
    return config_from_dict({
        "cavity": {"kappa": 5e6, "nbar": 1e4, "epsilon": 1.0},
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0, "sigma": sigma},
        ],
        "grid": {"fs": 3e6, "tf": tf},
    })


def zero_noise(dim: int) -> NoiseCovarianceSet:
    zeros = np.zeros((dim, dim))
    return NoiseCovarianceSet(M=zeros, T=zeros, B=zeros)


def test_wishart_standard_errors():
    """Closed-form examples and the n_s guard"""
    print("\n" + "=" * 60)
    print("TEST: Wishart standard errors")
    print("=" * 60)

    se = wishart_se(np.eye(2), 101)
    assert se[0, 0] == pytest.approx(math.sqrt(0.02))
    assert se[0, 1] == pytest.approx(0.1)
    with pytest.raises(InsufficientSamplesError):
        wishart_se(np.eye(2), 1)
    with pytest.raises(InsufficientSamplesError):
        sample_covariance(np.zeros((1, 2)))
    print(f"✓ SE diag {se[0, 0]:.4f}, off-diag {se[0, 1]:.4f}")


def test_bootstrap_agrees_with_wishart():
    """Resampled spread matches the Gaussian formula"""
    print("\n" + "=" * 60)
    print("TEST: Bootstrap vs Wishart")
    print("=" * 60)

    truth = np.array([[2.0, 0.5], [0.5, 1.0]])
    draws = np.random.default_rng(3).multivariate_normal(np.zeros(2), truth, size=2000)
    estimate = sample_covariance(draws)
    boot = bootstrap_se(draws, n_resamples=200, rng=np.random.default_rng(4))
    ratio = boot / estimate.se
    print(f"✓ Bootstrap/Wishart ratios {np.round(ratio, 3).tolist()}")
    assert ratio.mean() == pytest.approx(1.0, rel=0.15)
    assert np.all(np.abs(ratio - 1.0) < 0.3)


def test_inference_with_zero_noise():
    """No bias leaves the sample covariance unchanged"""
    print("\n" + "=" * 60)
    print("TEST: Inference with zero noise")
    print("=" * 60)

    draws = np.random.default_rng(6).normal(scale=1.2, size=(500, 2))
    estimate = sample_covariance(draws)
    inferred = infer_state_cov(estimate, zero_noise(2))
    assert np.allclose(inferred.cov, estimate.sigma)
    assert np.allclose(inferred.se, estimate.se)
    assert inferred.physical

    squeezed_too_far = sample_covariance(np.random.default_rng(6).normal(scale=0.3, size=(500, 2)))
    flagged = infer_state_cov(squeezed_too_far, zero_noise(2))
    assert not flagged.physical
    assert flagged.violations
    assert np.allclose(flagged.cov, squeezed_too_far.sigma)
    assert physicality_violations(np.diag([1.0, -1.0]))
    print("✓ Unchanged covariance, violations reported without clipping")


def test_cross_error_and_occupation():
    """Complex cross error of a two-mode bias block"""
    print("\n" + "=" * 60)
    print("TEST: Cross error")
    print("=" * 60)

    K = np.array([[0.2, 0.3], [-0.1, 0.4]])
    total = np.block([[np.eye(2), K], [K.T, 2 * np.eye(2)]])
    zeros = np.zeros((4, 4))
    noise = NoiseCovarianceSet(M=zeros, T=zeros, B=total)

    assert cross_error(noise) == pytest.approx(0.3 + 0.2j)
    assert added_occupation(noise, 0) == pytest.approx(1.0)
    assert added_occupation(noise, 1) == pytest.approx(2.0)
    with pytest.raises(ConfigValidationError):
        added_occupation(noise, 2)
    with pytest.raises(ConfigValidationError):
        cross_error(zero_noise(2))
    print("✓ ½[N00 + N11 + i(N01 − N10)] and per-mode Δn")


def test_noise_covariances_scale():
    """M halves when ε doubles; matrices are PSD"""
    print("\n" + "=" * 60)
    print("TEST: Noise covariance scaling")
    print("=" * 60)

    full = single_config()
    half = full.evolve(cavity=full.cavity.model_copy(update={"epsilon": 0.5}))
    bank = ols_filters(full)
    m_full = noise_covariance_set(full, bank).M
    m_half = noise_covariance_set(half, bank).M
    assert np.trace(m_half) == pytest.approx(2 * np.trace(m_full))

    noise = noise_covariance_set(full, bank)
    for name in ("M", "T", "B"):
        matrix = getattr(noise, name)
        assert np.allclose(matrix, matrix.T)
        assert np.linalg.eigvalsh(matrix).min() > -1e-9 * np.trace(matrix)
    print(f"✓ Δn(OLS) = {noise.delta_n[0]:.4f}")


def test_closure_on_simulated_thermal_state():
    """Inferred covariance returns the known state; ⟨S²⟩ model matches"""
    print("\n" + "=" * 60)
    print("TEST: Decomposition closure")
    print("=" * 60)

    config = single_config()
    truth = thermal_state([1.0])
    report = RetrodictionPipeline(config, "ols").run_simulated(truth, 600, master_seed=21)

    z = report.closure_z()
    print(f"✓ Closure z-scores {np.round(z, 2).tolist()}")
    assert np.all(np.abs(z) < 4)
    assert np.allclose(z, closure_z_scores(report.inferred, truth))
    assert report.estimates.shape == (600, 2)
    assert report.master_seed == 21

    table = report.mean_square
    within = np.mean(np.abs(table["z"].to_numpy()) < 3)
    print(f"✓ Mean-square bins within 3 SE: {within:.1%}")
    assert within > 0.95


def test_mean_square_model():
    """Model starts at the coherent value and the floor"""
    print("\n" + "=" * 60)
    print("TEST: Mean-square model")
    print("=" * 60)

    config = single_config(tf=2e-4)
    state = thermal_state([1.0])
    model = mean_square_signal(config, state)
    d = config.derived
    floor = d.shot_noise_psd * config.grid.fs
    coherent = 2 * d.g_eff[0] ** 2 * 1.5
    assert model[0] == pytest.approx(floor + coherent, rel=1e-9)
    assert np.all(model > floor)

    samples = np.random.default_rng(0).normal(scale=2.0, size=(50, 100))
    mean, se = empirical_mean_square(samples, bin_size=10)
    assert mean.shape == (10,) and se.shape == (10,)
    assert np.all(se > 0)
    with pytest.raises(ConfigValidationError):
        mean_square_signal(config, thermal_state([1.0, 1.0]))
    print(f"✓ ⟨S²(0)⟩ = floor + {coherent / floor:.3f}·floor")


def test_broadened_moments_without_broadening():
    """σ = 0 reduces to the ordinary inference with population normalization"""
    print("\n" + "=" * 60)
    print("TEST: Broadened moments at σ = 0")
    print("=" * 60)

    config = single_config(tf=5e-4)
    ensemble = run_ensemble(config, thermal_state([1.0]), 200, master_seed=5)
    bank = avg_filters(config)
    estimates = estimate_many(bank, ensemble.records)

    result = broadened_second_moments(config, bank, estimates)
    assert result.n_draws == 1

    covariance = sample_covariance(estimates)
    noise = noise_covariance_set(config, bank)
    n = estimates.shape[0]
    expected = covariance.sigma * (n - 1) / n - noise.total()
    scale = np.max(np.abs(covariance.sigma))
    assert np.allclose(result.cov, expected, rtol=1e-8, atol=1e-8 * scale)
    assert np.allclose(result.noise.total(), noise.total(), rtol=1e-8, atol=1e-12 * scale)
    assert result.noise.variant == "primed"
    print("✓ Matches Σ̂(n−1)/n − (T + B + M)")


def test_broadened_pipeline_recovers_state():
    """Frequency-broadened thermal ensemble through the averaged bank"""
    print("\n" + "=" * 60)
    print("TEST: Broadened retrodiction")
    print("=" * 60)

    config = single_config(sigma=0.3e3)
    report = RetrodictionPipeline(config, "avg").run_simulated(thermal_state([1.0]), 800, master_seed=31)
    assert report.broadened is not None
    assert report.broadened.n_draws > 1

    cov, se = report.inferred.cov, report.inferred.se
    for k in range(2):
        print(f"✓ ⟨Q{k}²⟩ = {cov[k, k]:.3f} ± {se[k, k]:.3f}")
        assert abs(cov[k, k] - 1.5) < 4 * se[k, k] + 0.1


def test_squeezed_input_inferred_below_vacuum():
    """−10 dB squeezed input at C = 20: inferred variance below 1/2 by more than 3σ"""
    print("\n" + "=" * 60)
    print("TEST: Squeezed-state inference")
    print("=" * 60)

    config = load_preset("single-squeezed", tf=5e-4)
    truth = parse_state_spec("squeezed:db=-10", 1)
    report = RetrodictionPipeline(config, "gls").run_simulated(truth, 2000, master_seed=41)

    cov, se = report.inferred.cov, report.inferred.se
    k = int(np.argmin(np.diag(cov)))
    print(f"✓ ⟨Q{k}²⟩ = {cov[k, k]:.3f} ± {se[k, k]:.3f} (input {truth.cov[k, k]:.3f})")
    assert (0.5 - cov[k, k]) / se[k, k] >= 3
    assert squeezing_db(report.inferred.cov) < 0


def test_two_mode_squeezed_input():
    """TMSS occupation sinh²|z| and the X₁P₂ / P₁X₂ correlation of imaginary z"""
    print("\n" + "=" * 60)
    print("TEST: Two-mode squeezed inference")
    print("=" * 60)

    config = load_preset("tmss", tf=5e-4)
    truth = parse_state_spec("tmss:z=1.15i", 2)
    report = RetrodictionPipeline(config, "gls").run_simulated(truth, 2000, master_seed=43)
    inferred = GaussianState(mean=report.inferred.mean, cov=report.inferred.cov)

    expected = math.sinh(1.15) ** 2
    for i in range(2):
        n = mode_occupation(inferred, i)
        print(f"✓ Mode {i}: occupation {n:.3f} (expected {expected:.3f})")
        assert n == pytest.approx(expected, rel=0.15)

    off = report.inferred.cov[0:2, 2:4]
    off_se = report.inferred.se[0:2, 2:4]
    target = truth.cov[0:2, 2:4]
    assert abs(target[0, 0]) < 1e-12 and abs(target[1, 1]) < 1e-12
    assert np.all(np.abs(off - target) < 4 * off_se + 0.1)
    assert np.sign(off[0, 1]) == np.sign(target[0, 1])
    assert np.sign(off[1, 0]) == np.sign(target[1, 0])
    print(f"✓ Off-diagonal block {np.round(off, 2).tolist()}")


def run_all_tests():
    """Run all noise statistics tests"""
    print("\n" + "=" * 80)
    print(" " * 24 + "NOISE STATISTICS TEST SUITE")
    print("=" * 80)

    try:
        test_wishart_standard_errors()
        test_bootstrap_agrees_with_wishart()
        test_inference_with_zero_noise()
        test_cross_error_and_occupation()
        test_noise_covariances_scale()
        test_closure_on_simulated_thermal_state()
        test_mean_square_model()
        test_broadened_moments_without_broadening()
        test_broadened_pipeline_recovers_state()
        test_squeezed_input_inferred_below_vacuum()
        test_two_mode_squeezed_input()

        print("\n" + "=" * 80)
        print(" " * 30 + "ALL TESTS PASSED")
        print("=" * 80)

    except AssertionError as e:
        print(f"\n❌ Assertion failed: {e}")
        logger.error("Test assertion failed", exc_info=True)
        raise


if __name__ == "__main__":
    run_all_tests()
