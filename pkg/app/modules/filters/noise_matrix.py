"""
Two-Time Noise Matrix
Dense Ω of the sampled signal and the decimation rule of the GLS design grid
"""

import math
from typing import Optional, Sequence

import numpy as np

from app.models.system import SamplingGrid, SystemConfig
from app.modules.physics.model import ensure_validated
from app.modules.statistics.kernels import backaction_kernel, response_correlation
from app.core.config import settings
from app.core.exceptions import MemoryBudgetError
from app.core.logging import get_logger

logger = get_logger(__name__)

BYTES_PER_ENTRY = 8
TILE_ROWS = 512
# Decimated Nyquist (Hz) must exceed this multiple of max|ω|/2π
NYQUIST_FACTOR = 5.0


def _required_bytes(nt: int) -> int:
    return nt * nt * BYTES_PER_ENTRY


def suggest_decimation(nt: int, budget_bytes: Optional[int] = None) -> int:
    """Smallest factor whose decimated grid fits the memory budget"""
    budget = budget_bytes or settings.omega_budget_bytes()
    max_nt = max(2, int(math.isqrt(budget // BYTES_PER_ENTRY)))
    return max(1, math.ceil(nt / max_nt))


def choose_decimation(config: SystemConfig, budget_bytes: Optional[int] = None) -> int:
    """
    Decimation factor of the GLS design grid

    The smallest d that fits the memory budget, provided the decimated Nyquist
    frequency fs/(2d) stays above 5·max|ω|/2π.
    """
    budget = budget_bytes or settings.omega_budget_bytes()
    nt = config.grid.nt
    d = suggest_decimation(nt, budget)
    if d == 1:
        return 1

    max_hz = max(abs(o.omega) for o in config.oscillators) / (2 * math.pi)
    if not config.grid.fs / (2 * d) > NYQUIST_FACTOR * max_hz:
        raise MemoryBudgetError(_required_bytes(nt), budget, d)

    logger.info(f"ℹ️  GLS design grid decimated by {d} (nt {nt} -> {(nt - 1) // d + 1})")
    return d


def noise_matrix(
    config: SystemConfig,
    omega_override: Optional[Sequence[float]] = None,
    grid: Optional[SamplingGrid] = None,
    budget_bytes: Optional[int] = None
) -> np.ndarray:
    """
    Ω[n, m] = 2 Σ_kl g_k g_l ⟨D_k(t_n) D_l(t_m)⟩ + P_SN·fs·δ_nm

    Thermal diffusion enters with k = l only (rate Γ(ν+1/2) + extra diffusion,
    kernel R_kk); backaction enters for every pair with √(ba_k ba_l) times the
    momentum-drive kernel. Assembled from the closed-form kernels in row tiles.

    Args:
        config: System configuration
        omega_override: Frequencies replacing the nominal ones
        grid: Grid to evaluate on (config grid by default)
        budget_bytes: Memory budget (settings by default)

    Returns:
        np.ndarray: Symmetric (nt, nt) matrix
    """
    config = ensure_validated(config)
    grid = grid or config.grid
    nt = grid.nt
    budget = budget_bytes or settings.omega_budget_bytes()
    if _required_bytes(nt) > budget:
        raise MemoryBudgetError(_required_bytes(nt), budget, suggest_decimation(nt, budget))

    oscillators = config.oscillators
    if omega_override is not None:
        oscillators = [o.model_copy(update={"omega": float(w)}) for o, w in zip(oscillators, omega_override)]

    d = config.derived
    g = np.asarray(d.g_eff)
    th = np.asarray(d.thermal_rate)
    ba = np.asarray(d.backaction_rate)
    phi = np.asarray(d.phi)

    t = grid.times()
    omega = np.empty((nt, nt))
    for start in range(0, nt, TILE_ROWS):
        rows = slice(start, min(start + TILE_ROWS, nt))
        tt = t[rows, None]
        tp = t[None, :]
        block = np.zeros((tt.shape[0], nt))
        for k, osc_k in enumerate(oscillators):
            if th[k] > 0:
                block += 2 * g[k] ** 2 * th[k] * response_correlation(
                    osc_k, osc_k, tt, tp, phi[k], phi[k]
                )
            for l, osc_l in enumerate(oscillators):
                if ba[k] > 0 and ba[l] > 0:
                    block += 2 * g[k] * g[l] * np.sqrt(ba[k] * ba[l]) * backaction_kernel(
                        osc_k, osc_l, tt, tp, phi[k], phi[l], exact=True
                    )
        omega[rows] = block

    omega = 0.5 * (omega + omega.T)
    if d.shot_noise_psd is not None:
        omega[np.diag_indices(nt)] += d.shot_noise_psd * grid.fs
    return omega
