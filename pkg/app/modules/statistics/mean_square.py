"""
Mean-Square Signal
Model and ensemble estimate of ⟨S²(t)⟩
"""

from typing import Optional, Tuple

import numpy as np
import pandas as pd

from app.models.state import GaussianState
from app.models.system import SamplingGrid, SystemConfig
from app.modules.filters.response import signal_response
from app.modules.physics.model import ensure_validated, require_shot_noise
from app.modules.simulators.simulator import sample_frequencies
from app.modules.statistics.kernels import backaction_kernel, response_correlation
from app.core.config import settings
from app.core.exceptions import ConfigValidationError, InsufficientSamplesError
from app.core.logging import get_logger

logger = get_logger(__name__)


def _coherent_term(config: SystemConfig, second_moments: np.ndarray, grid: SamplingGrid) -> np.ndarray:
    """2Σ g_i g_j r̃_iᵀ⟨Q_iQ_jᵀ⟩r̃_j, averaged over frequency draws when broadened"""
    if all(o.sigma == 0 for o in config.oscillators):
        A = signal_response(config, grid)
        return np.einsum("it,ij,jt->t", A, second_moments, A)

    rng = np.random.default_rng(settings.BROADENED_SEED)
    total = np.zeros(grid.nt)
    for _ in range(settings.N_OMEGA_DRAWS):
        omegas = sample_frequencies(config, rng)
        A = signal_response(config, grid, omegas=omegas)
        total += np.einsum("it,ij,jt->t", A, second_moments, A)
    return total / settings.N_OMEGA_DRAWS


def _diffusion_term(config: SystemConfig, grid: SamplingGrid) -> np.ndarray:
    """2Σ g_k g_l ⟨D_k(t) D_l(t)⟩ at equal times"""
    d = config.derived
    t = grid.times()
    out = np.zeros(grid.nt)
    oscillators = config.oscillators
    for k, osc_k in enumerate(oscillators):
        if d.thermal_rate[k] > 0:
            out += 2 * d.g_eff[k] ** 2 * d.thermal_rate[k] * response_correlation(
                osc_k, osc_k, t, t, d.phi[k], d.phi[k]
            )
        for l, osc_l in enumerate(oscillators):
            ba = np.sqrt(d.backaction_rate[k] * d.backaction_rate[l])
            if ba > 0:
                out += 2 * d.g_eff[k] * d.g_eff[l] * ba * backaction_kernel(
                    osc_k, osc_l, t, t, d.phi[k], d.phi[l], exact=True
                )
    return out


def mean_square_signal(
    config: SystemConfig,
    state: GaussianState,
    grid: Optional[SamplingGrid] = None
) -> np.ndarray:
    """
    Model of the ensemble-mean squared homodyne signal

    ⟨S²(t)⟩ = 2Σ g_i g_j r̃_iᵀ⟨Q_iQ_jᵀ⟩r̃_j + P_SN·fs + 2Σ g_k g_l⟨D_k D_l⟩(t, t)

    Args:
        config: System configuration
        state: Initial Gaussian state
        grid: Time grid (config grid by default)

    Returns:
        np.ndarray: Model value per sample time
    """
    config = ensure_validated(config)
    grid = grid or config.grid
    if state.n_modes != config.n_modes:
        raise ConfigValidationError("state", f"{config.n_modes} modes", state.n_modes)

    floor = require_shot_noise(config) * grid.fs
    return _coherent_term(config, state.second_moments(), grid) + floor + _diffusion_term(config, grid)


class MeanSquareAccumulator:
    """Streaming per-bin mean of S² over shots, without holding the ensemble"""

    def __init__(self, nt: int, bin_size: int = 1):
        self.bin_size = max(1, int(bin_size))
        self.n_bins = nt // self.bin_size
        self.n = 0
        self._sum = np.zeros(self.n_bins)
        self._sum_sq = np.zeros(self.n_bins)

    def update(self, samples: np.ndarray):
        """Add one record (nt,) or a block of records (n, nt)"""
        samples = np.atleast_2d(samples)
        cut = self.n_bins * self.bin_size
        per_shot = (samples[:, :cut] ** 2).reshape(samples.shape[0], self.n_bins, self.bin_size).mean(axis=2)
        self.n += per_shot.shape[0]
        self._sum += per_shot.sum(axis=0)
        self._sum_sq += (per_shot ** 2).sum(axis=0)

    def result(self) -> Tuple[np.ndarray, np.ndarray]:
        """(mean, standard error) per bin"""
        if self.n < 2:
            raise InsufficientSamplesError(f"mean-square estimate needs n_s >= 2 (got {self.n})")
        mean = self._sum / self.n
        var = np.clip((self._sum_sq - self.n * mean ** 2) / (self.n - 1), 0.0, None)
        return mean, np.sqrt(var / self.n)


def empirical_mean_square(samples: np.ndarray, bin_size: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-bin ensemble mean of S² and its standard error

    Args:
        samples: (n_s, nt) records
        bin_size: Consecutive samples averaged per bin

    Returns:
        Tuple: (mean, standard error), one value per bin
    """
    samples = np.atleast_2d(samples)
    acc = MeanSquareAccumulator(samples.shape[1], bin_size)
    acc.update(samples)
    return acc.result()


def compare_mean_square(
    config: SystemConfig,
    state: GaussianState,
    empirical: np.ndarray,
    se: np.ndarray,
    bin_size: int = 1
) -> pd.DataFrame:
    """Binned model-vs-empirical comparison with z-scores"""
    config = ensure_validated(config)
    model = mean_square_signal(config, state)
    n_bins = empirical.size
    model_binned = model[:n_bins * bin_size].reshape(n_bins, bin_size).mean(axis=1)
    t = config.grid.times()[:n_bins * bin_size].reshape(n_bins, bin_size).mean(axis=1)

    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (empirical - model_binned) / se, 0.0)
    table = pd.DataFrame({
        "time_s": t,
        "model": model_binned,
        "empirical": empirical,
        "se": se,
        "z": z,
    })
    logger.info(f"✓ Mean-square check: max |z| = {np.max(np.abs(z)):.2f} over {n_bins} bins")
    return table


def mean_square_table(
    config: SystemConfig,
    state: GaussianState,
    samples: np.ndarray,
    bin_size: int = 1
) -> pd.DataFrame:
    """Model-vs-empirical table from an in-memory (n_s, nt) sample matrix"""
    empirical, se = empirical_mean_square(samples, bin_size)
    return compare_mean_square(config, state, empirical, se, bin_size)
