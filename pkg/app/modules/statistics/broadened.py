"""
Broadened Second Moments
Moment inversion when the normalization matrix fluctuates from shot to shot
"""

from typing import Optional, Tuple

import numpy as np

from app.models.filters import FilterBank, FilterFamily
from app.models.statistics import BroadenedResult, NoiseCovarianceSet
from app.models.system import SystemConfig
from app.modules.filters.response import riemann_sum, signal_response
from app.modules.physics.model import config_hash, ensure_validated
from app.modules.simulators.simulator import sample_frequencies
from app.modules.statistics.noise_covariance import backaction_weights, shot_noise_weights, thermal_weights
from app.core.config import settings
from app.core.exceptions import GridMismatchError, InsufficientSamplesError, RankDeficientError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Smallest-to-largest singular value ratio of the weighted moment system
RANK_TOL = 1e-10


def _duplication(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Duplication matrix vec(X) = D vech(X) and the (i, j) pairs of vech"""
    pairs = [(i, j) for j in range(dim) for i in range(j, dim)]
    D = np.zeros((dim * dim, len(pairs)))
    for p, (i, j) in enumerate(pairs):
        D[i * dim + j, p] = 1.0
        D[j * dim + i, p] = 1.0
    return D, np.array(pairs)


def _unvech(values: np.ndarray, pairs: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim))
    out[pairs[:, 0], pairs[:, 1]] = values
    out[pairs[:, 1], pairs[:, 0]] = values
    return out


def _draw_expectations(
    config: SystemConfig,
    bank: FilterBank,
    n_draws: int,
    exact: bool
) -> dict:
    """Per-draw J and unnormalized noise covariances over the frequency distribution"""
    rng = np.random.default_rng(settings.BROADENED_SEED)
    dim = bank.dim
    W_raw = bank.m * bank.grid.dt

    J_draws = np.empty((n_draws, dim, dim))
    T_draws = np.empty((n_draws, dim, dim))
    B_draws = np.empty((n_draws, dim, dim))
    for d in range(n_draws):
        omegas = sample_frequencies(config, rng)
        A = signal_response(config, omegas=omegas)
        J_draws[d] = riemann_sum(bank.m, A, bank.grid.dt)
        T_draws[d] = thermal_weights(config, W_raw, omegas=omegas)
        B_draws[d] = backaction_weights(config, W_raw, exact=exact, omegas=omegas)

    return {
        "J": J_draws,
        "T": T_draws,
        "B": B_draws,
        "M": shot_noise_weights(config, W_raw),
    }


def _solve_weighted(design: np.ndarray, target: np.ndarray, variance: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    w = 1.0 / np.sqrt(np.maximum(variance, np.finfo(float).tiny))
    A = design * w[:, None]
    b = target * w
    s = np.linalg.svd(A, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if ratio < RANK_TOL:
        raise RankDeficientError(float(s[-1]))
    solution, *_ = np.linalg.lstsq(A, b, rcond=None)
    param_cov = np.linalg.pinv(A.T @ A)
    return solution, param_cov, float(s[-1])


def broadened_second_moments(
    config: SystemConfig,
    bank: FilterBank,
    estimates: np.ndarray,
    n_draws: Optional[int] = None,
    exact: bool = True
) -> BroadenedResult:
    """
    Recover ⟨Q_k Q_l⟩ from estimates of a broadening-averaged bank

    Per shot the raw outputs are q = J_ω Q + n_ω with J_ω and the noise
    depending on the realized frequencies. Their second moments obey
    vec E[q qᵀ] = E[J⊗J] vec⟨QQᵀ⟩ + vec E[N'], which is solved for the
    symmetric ⟨QQᵀ⟩ by weighted least squares. Weights combine the sampling
    variance of the empirical moments with the Monte Carlo variance of the
    frequency average (second pass, evaluated at the first-pass solution).

    Args:
        config: System configuration
        bank: Bank the estimates came from (normally AVG, J = ⟨J⟩)
        estimates: (n_s, 2N) estimates normalized by bank.J
        n_draws: Frequency draws (settings.N_OMEGA_DRAWS by default)
        exact: Exact momentum-drive backaction kernel

    Returns:
        BroadenedResult
    """
    config = ensure_validated(config)
    estimates = np.atleast_2d(np.asarray(estimates, dtype=float))
    n_s, dim = estimates.shape
    if n_s < 2:
        raise InsufficientSamplesError(f"moment inversion needs n_s >= 2 (got {n_s})")
    if dim != bank.dim or bank.nt != config.grid.nt:
        raise GridMismatchError(f"estimates of dimension {dim} do not match bank ({bank.dim} x {bank.nt})")
    if bank.family != FilterFamily.AVG:
        logger.warning(f"⚠️  moment inversion applied to a {bank.family.value} bank; AVG is expected")

    broadened = any(o.sigma > 0 for o in config.oscillators)
    n_draws = (n_draws or settings.N_OMEGA_DRAWS) if broadened else 1
    if not broadened:
        logger.info("ℹ️  no frequency broadening configured, moment system uses the nominal J")

    draws = _draw_expectations(config, bank, n_draws, exact)
    J_d = draws["J"]
    N_d = draws["T"] + draws["B"] + draws["M"][None, :, :]

    kron = np.einsum("dik,djl->dijkl", J_d, J_d).reshape(n_draws, dim * dim, dim * dim)
    D, pairs = _duplication(dim)
    design = kron.mean(axis=0) @ D
    noise_mean = N_d.mean(axis=0).ravel()

    raw = estimates @ bank.J.T
    products = np.einsum("si,sj->sij", raw, raw).reshape(n_s, dim * dim)
    target = products.mean(axis=0) - noise_mean
    data_var = products.var(axis=0, ddof=1) / n_s

    solution, param_cov, smallest = _solve_weighted(design, target, data_var)
    if n_draws > 1:
        X = _unvech(solution, pairs, dim)
        per_draw = np.einsum("dik,kl,djl->dij", J_d, X, J_d).reshape(n_draws, -1) + N_d.reshape(n_draws, -1)
        mc_var = per_draw.var(axis=0, ddof=1) / n_draws
        solution, param_cov, smallest = _solve_weighted(design, target, data_var + mc_var)

    X = _unvech(solution, pairs, dim)
    se = _unvech(np.sqrt(np.clip(np.diag(param_cov), 0.0, None)), pairs, dim)
    J_avg = J_d.mean(axis=0)
    mean = np.linalg.solve(J_avg, raw.mean(axis=0))

    J_inv = np.linalg.inv(J_avg)
    primed = NoiseCovarianceSet(
        M=J_inv @ draws["M"] @ J_inv.T,
        T=J_inv @ draws["T"].mean(axis=0) @ J_inv.T,
        B=J_inv @ draws["B"].mean(axis=0) @ J_inv.T,
        variant="primed",
        family=bank.label(),
        exact_backaction=exact,
        config_hash=config_hash(config),
    )

    logger.info(f"✓ Broadened moments from {n_s} shots and {n_draws} frequency draws")
    return BroadenedResult(
        second_moments=X,
        mean=mean,
        cov=X - np.outer(mean, mean),
        se=se,
        J_avg=J_avg,
        noise=primed,
        smallest_singular_value=smallest,
        n_draws=n_draws,
    )
