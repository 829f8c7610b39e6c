"""
Noise Covariances
Shot-noise, thermal and backaction bias matrices of a filter bank
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from app.models.filters import FilterBank
from app.models.statistics import NoiseCovarianceSet
from app.models.system import SystemConfig
from app.modules.physics.model import config_hash, ensure_validated, require_shot_noise
from app.modules.statistics.kernels import pair_rates, quadratic_form
from app.core.exceptions import ConfigValidationError, GridMismatchError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Gauss-Legendre nodes per sample interval of the quadrature oracle
ORACLE_NODES = 8


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def _check_bank(config: SystemConfig, bank: FilterBank):
    if bank.nt != config.grid.nt or not np.isclose(bank.grid.fs, config.grid.fs):
        raise GridMismatchError(
            f"bank grid (fs={bank.grid.fs:g}, nt={bank.nt}) does not match config "
            f"(fs={config.grid.fs:g}, nt={config.grid.nt})"
        )
    if bank.dim != 2 * config.n_modes:
        raise GridMismatchError(f"bank has {bank.dim} rows, config needs {2 * config.n_modes}")


def shot_noise_weights(config: SystemConfig, weights: np.ndarray) -> np.ndarray:
    """P_SN·fs·W Wᵀ for arbitrary per-sample weight rows"""
    config = ensure_validated(config)
    p_sn = require_shot_noise(config)
    return _symmetrize(p_sn * config.grid.fs * (weights @ weights.T))


def thermal_weights(
    config: SystemConfig,
    weights: np.ndarray,
    omegas: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    Σ_k 2 g_k² th_k Σ_nm W_n R_kk(t_n, t_m) W_mᵀ

    Args:
        config: Validated configuration
        weights: Per-sample weight rows (rows, nt)
        omegas: Frequency override (one realized draw)
    """
    config = ensure_validated(config)
    d = config.derived
    times = config.grid.times()
    out = np.zeros((weights.shape[0], weights.shape[0]))
    for k, osc in enumerate(config.oscillators):
        th = d.thermal_rate[k]
        if th <= 0:
            continue
        w = None if omegas is None else omegas[k]
        a_left, a_right, phase = pair_rates(osc, osc, d.phi[k], d.phi[k], omega_k=w, omega_l=w)
        out += 2 * d.g_eff[k] ** 2 * th * quadratic_form(weights, weights, times, a_left, a_right, phase)
    return _symmetrize(out)


def backaction_weights(
    config: SystemConfig,
    weights: np.ndarray,
    exact: bool = True,
    omegas: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    Σ_kl 2 g_k g_l √(ba_k ba_l)·W K_kl Wᵀ with K = ½(R − R⁺), or ½R in the RWA

    Args:
        config: Validated configuration
        weights: Per-sample weight rows (rows, nt)
        exact: Use the momentum-drive kernel instead of its rotating-wave form
        omegas: Frequency override (one realized draw)
    """
    config = ensure_validated(config)
    d = config.derived
    times = config.grid.times()
    ba = np.asarray(d.backaction_rate)
    out = np.zeros((weights.shape[0], weights.shape[0]))
    if not np.any(ba > 0):
        return out

    oscillators = config.oscillators
    for k, osc_k in enumerate(oscillators):
        for l, osc_l in enumerate(oscillators):
            if ba[k] <= 0 or ba[l] <= 0:
                continue
            w_k = None if omegas is None else omegas[k]
            w_l = None if omegas is None else omegas[l]
            scale = 2 * d.g_eff[k] * d.g_eff[l] * np.sqrt(ba[k] * ba[l])
            a_left, a_right, phase = pair_rates(osc_k, osc_l, d.phi[k], d.phi[l], omega_k=w_k, omega_l=w_l)
            block = quadratic_form(weights, weights, times, a_left, a_right, phase)
            if exact:
                a_left, a_right, phase = pair_rates(
                    osc_k, osc_l, d.phi[k], d.phi[l], plus=True, omega_k=w_k, omega_l=w_l
                )
                block = block - quadratic_form(weights, weights, times, a_left, a_right, phase)
            out += 0.5 * scale * block
    return _symmetrize(out)


def shot_noise_cov(config: SystemConfig, bank: FilterBank) -> np.ndarray:
    """M = P_SN·fs·W Wᵀ with W = J⁻¹ m Δt"""
    config = ensure_validated(config)
    _check_bank(config, bank)
    return shot_noise_weights(config, bank.normalized_weights())


def thermal_cov(config: SystemConfig, bank: FilterBank) -> np.ndarray:
    """T: thermal (and extra) quadrature diffusion seen through the normalized bank"""
    config = ensure_validated(config)
    _check_bank(config, bank)
    return thermal_weights(config, bank.normalized_weights())


def backaction_cov(config: SystemConfig, bank: FilterBank, exact: bool = True) -> np.ndarray:
    """B: shared backaction diffusion seen through the normalized bank"""
    config = ensure_validated(config)
    _check_bank(config, bank)
    return backaction_weights(config, bank.normalized_weights(), exact=exact)


def noise_covariance_set(
    config: SystemConfig,
    bank: FilterBank,
    exact: bool = True
) -> NoiseCovarianceSet:
    """
    M, T and B of one bank

    Args:
        config: System configuration
        bank: Filter bank on the config grid
        exact: Exact momentum-drive backaction kernel (RWA otherwise)

    Returns:
        NoiseCovarianceSet: Matrices plus per-oscillator added occupation
    """
    config = ensure_validated(config)
    _check_bank(config, bank)
    W = bank.normalized_weights()
    noise = NoiseCovarianceSet(
        M=shot_noise_weights(config, W),
        T=thermal_weights(config, W),
        B=backaction_weights(config, W, exact=exact),
        family=bank.label(),
        exact_backaction=exact,
        config_hash=config_hash(config),
    )
    logger.debug(f"{bank.label()} added occupation: " + ", ".join(f"{x:.4g}" for x in noise.delta_n))
    return noise


def added_occupation(noise: NoiseCovarianceSet, i: int) -> float:
    """Δn_i = ½·trace of the i-th diagonal block of T + B + M"""
    if not 0 <= i < noise.n_modes:
        raise ConfigValidationError("oscillator index", f"0 <= i < {noise.n_modes}", i)
    return noise.delta_n[i]


def cross_error(noise: NoiseCovarianceSet, i: int = 0, j: int = 1) -> complex:
    """⟨Δa_i† Δa_j⟩ = ½(1, −i)·N_ij·(1, i)ᵀ from the total bias block"""
    if noise.n_modes < 2:
        raise ConfigValidationError("oscillators", "cross error needs two oscillators", noise.n_modes)
    block = noise.block(i, j)
    return complex(0.5 * (block[0, 0] + block[1, 1] + 1j * (block[0, 1] - block[1, 0])))


def _oracle_nodes(times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(ORACLE_NODES)
    dt = times[1] - times[0]
    starts = times[:-1]
    nodes = (starts[:, None] + 0.5 * dt * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * dt * w, starts.size)
    return nodes, weights


def diffusion_cov_by_quadrature(
    config: SystemConfig,
    weights: np.ndarray,
    exact: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """
    T and B from the source-time integral, without the closed-form kernels

    Each diffusion source at time s reaches the estimate through
    G_k(s) = Σ_n W_n e^{iφ_k} ρ_k(t_n − s); the source integral runs over
    Gauss-Legendre nodes inside every sample interval. Slow; for cross-checks.

    Returns:
        Tuple: (T, B) for the weight rows
    """
    config = ensure_validated(config)
    d = config.derived
    times = config.grid.times()
    nodes, node_w = _oracle_nodes(times)
    lag = times[:, None] - nodes[None, :]
    causal = lag > 0

    G = []
    for k, osc in enumerate(config.oscillators):
        rho = np.where(causal, np.exp(-(osc.gamma / 2 + 1j * osc.omega) * np.where(causal, lag, 0.0)), 0.0)
        G.append(np.exp(1j * d.phi[k]) * (weights @ rho))

    rows = weights.shape[0]
    T = np.zeros((rows, rows))
    B = np.zeros((rows, rows))
    for k in range(config.n_modes):
        G_k = G[k]
        T += 2 * d.g_eff[k] ** 2 * d.thermal_rate[k] * np.real((G_k * node_w) @ np.conj(G_k).T)
        for l in range(config.n_modes):
            scale = 2 * d.g_eff[k] * d.g_eff[l] * np.sqrt(d.backaction_rate[k] * d.backaction_rate[l])
            if exact:
                B += scale * (np.imag(G_k) * node_w) @ np.imag(G[l]).T
            else:
                B += 0.5 * scale * np.real((G_k * node_w) @ np.conj(G[l]).T)
    return _symmetrize(T), _symmetrize(B)
