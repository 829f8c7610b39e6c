"""
Homodyne Simulator
Stochastic oscillator trajectories and sampled homodyne records
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter

from app.models.records import Ensemble, HomodyneRecord, TrajectorySet
from app.models.state import GaussianState
from app.models.system import SystemConfig
from app.modules.physics.model import ensure_validated, require_shot_noise
from app.modules.states.gaussian import sample
from app.core.exceptions import ConfigValidationError, InsufficientSamplesError, StepSizeError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Per-shot streams, spawned in this order from the shot's seed sequence
STREAMS = ("frequency", "state", "diffusion", "shot_noise")
# Sanity bound on realized frequencies, in units of σ
OMEGA_SANITY_SIGMAS = 6.0


def shot_streams(master_seed: int, shot_index: int) -> Dict[str, np.random.Generator]:
    """
    Independent generators of one shot

    Splitting rule: SeedSequence(master_seed).spawn(n)[shot_index].spawn(4),
    assigned in STREAMS order. The child is built directly from its spawn key so
    any shot can be regenerated alone.
    """
    shot_seq = np.random.SeedSequence(master_seed, spawn_key=(shot_index,))
    return {
        name: np.random.default_rng(child)
        for name, child in zip(STREAMS, shot_seq.spawn(len(STREAMS)))
    }


def sample_frequencies(config: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """
    Realized oscillator frequencies of one shot

    ω_i ~ Normal(ω_i, σ_i²); one normal is drawn per oscillator even when σ_i = 0,
    which then returns ω_i exactly.
    """
    omega = np.array([o.omega for o in config.oscillators])
    sigma = np.array([o.sigma for o in config.oscillators])
    return omega + sigma * rng.standard_normal(omega.size)


def _check_step(config: SystemConfig, omegas: np.ndarray):
    max_hz = np.max(np.abs(omegas)) / (2 * np.pi)
    if not config.grid.fs > 20.0 * max_hz:
        raise StepSizeError(
            f"fs={config.grid.fs:.4g} Hz too low for |omega|/2pi={max_hz:.4g} Hz (need 20x)"
        )


def simulate_trajectory(
    config: SystemConfig,
    initial_point: Sequence[float],
    rng: np.random.Generator,
    omegas: Optional[Sequence[float]] = None,
    include_diffusion: bool = True
) -> TrajectorySet:
    """
    Integrate the linear stochastic equations of every oscillator

    With z = X + iP the step is z_{n+1} = λ z_n + λ^{1/2} w_n, λ = e^{-(Γ/2+iω)Δt}:
    the exact propagator for the deterministic part and Gaussian increments w_n
    injected at the step midpoint. w_n carries the thermal density Γ(ν+1/2)
    (+ extra diffusion) on each quadrature and the shared backaction kick
    −√(4n̄g_eff²/κ · Δt)·ξ_n on P. Per step, the backaction normal is drawn first,
    then (X, P) thermal normals per oscillator.

    Args:
        config: System configuration
        initial_point: 2N-vector (X1, P1, X2, P2, ...) at t = 0
        rng: Diffusion stream
        omegas: Realized frequencies (nominal when None)
        include_diffusion: Disable to get the deterministic ringdown

    Returns:
        TrajectorySet: Quadratures on the config grid
    """
    config = ensure_validated(config)
    derived = config.derived
    n_osc, nt, dt = config.n_modes, config.grid.nt, config.grid.dt

    omegas = np.array([o.omega for o in config.oscillators] if omegas is None else omegas, dtype=float)
    _check_step(config, omegas)
    gammas = np.array([o.gamma for o in config.oscillators])
    point = np.asarray(initial_point, dtype=float).reshape(n_osc, 2)

    lam = np.exp(-(gammas / 2 + 1j * omegas) * dt)
    half = np.exp(-(gammas / 2 + 1j * omegas) * dt / 2)

    drive = np.zeros((n_osc, nt), dtype=complex)
    drive[:, 0] = point[:, 0] + 1j * point[:, 1]

    if include_diffusion and nt > 1:
        th = np.sqrt(np.asarray(derived.thermal_rate) * dt)
        ba = np.sqrt(np.asarray(derived.backaction_rate) * dt)
        normals = rng.standard_normal((nt - 1, 1 + 2 * n_osc))
        xi_ba = normals[:, 0]
        thermal = normals[:, 1:].reshape(nt - 1, n_osc, 2)
        kick = (
            th[None, :] * (thermal[:, :, 0] + 1j * thermal[:, :, 1])
            - 1j * ba[None, :] * xi_ba[:, None]
        )
        drive[:, 1:] = half[:, None] * kick.T

    quads = np.empty((n_osc, 2, nt))
    for i in range(n_osc):
        z = lfilter([1.0], [1.0, -lam[i]], drive[i])
        quads[i, 0] = z.real
        quads[i, 1] = z.imag

    return TrajectorySet(grid=config.grid, quads=quads)


def measured_quadratures(config: SystemConfig, traj: TrajectorySet) -> np.ndarray:
    """X̃_i = X_i cos φ_i − P_i sin φ_i, the sideband-delayed quadrature seen by the cavity"""
    config = ensure_validated(config)
    phi = np.asarray(config.derived.phi)
    return traj.quads[:, 0] * np.cos(phi)[:, None] - traj.quads[:, 1] * np.sin(phi)[:, None]


def synthesize_signal(
    config: SystemConfig,
    traj: TrajectorySet,
    rng: Optional[np.random.Generator],
    seed: int = 0,
    shot_index: int = 0,
    omega_realized: Optional[Sequence[float]] = None,
    include_shot_noise: bool = True
) -> HomodyneRecord:
    """
    Sampled homodyne signal S(t_n) = √2 Σ g_eff,i X̃_i(t_n) + √(P_SN·fs)·z_n

    Args:
        config: System configuration
        traj: Trajectories on the config grid
        rng: Shot-noise stream, independent of the backaction stream
        seed: Master seed recorded with the shot
        shot_index: Index of the shot
        omega_realized: Frequencies used by the trajectory
        include_shot_noise: Disable for noiseless fixtures

    Returns:
        HomodyneRecord: Signal plus provenance
    """
    config = ensure_validated(config)
    g_eff = np.asarray(config.derived.g_eff)
    signal = np.sqrt(2.0) * (g_eff[:, None] * measured_quadratures(config, traj)).sum(axis=0)

    if include_shot_noise:
        psd = require_shot_noise(config)
        signal = signal + np.sqrt(psd * config.grid.fs) * rng.standard_normal(config.grid.nt)

    if omega_realized is None:
        omega_realized = [o.omega for o in config.oscillators]
    return HomodyneRecord(
        samples=signal,
        seed=seed,
        shot_index=shot_index,
        omega_realized=omega_realized,
    )


def simulate_shot(
    config: SystemConfig,
    state: GaussianState,
    master_seed: int,
    shot_index: int
) -> Tuple[HomodyneRecord, np.ndarray]:
    """One full shot: frequency draw, initial point, diffusion and shot noise"""
    streams = shot_streams(master_seed, shot_index)
    omegas = sample_frequencies(config, streams["frequency"])
    point = sample(state, streams["state"])
    traj = simulate_trajectory(config, point, streams["diffusion"], omegas=omegas)
    record = synthesize_signal(
        config,
        traj,
        streams["shot_noise"],
        seed=master_seed,
        shot_index=shot_index,
        omega_realized=omegas,
    )

    sigma = np.array([o.sigma for o in config.oscillators])
    nominal = np.array([o.omega for o in config.oscillators])
    if np.any(np.abs(omegas - nominal) > OMEGA_SANITY_SIGMAS * sigma):
        logger.warning(f"⚠️  shot {shot_index}: realized frequency beyond {OMEGA_SANITY_SIGMAS:g} sigma")
    return record, point


def iter_ensemble(
    config: SystemConfig,
    state: GaussianState,
    n_s: int,
    master_seed: int,
    start: int = 0
) -> Iterator[Tuple[HomodyneRecord, np.ndarray]]:
    """Stream shots start..n_s-1 without holding the ensemble in memory"""
    config = ensure_validated(config)
    if state.n_modes != config.n_modes:
        raise ConfigValidationError(
            "state", f"state has {state.n_modes} modes, config has {config.n_modes} oscillators"
        )
    for k in range(start, n_s):
        yield simulate_shot(config, state, master_seed, k)


def run_ensemble(
    config: SystemConfig,
    state: GaussianState,
    n_s: int,
    master_seed: int,
    workers: int = 1
) -> Ensemble:
    """
    Simulate n_s independent shots, deterministic given master_seed

    Args:
        config: System configuration
        state: Initial Gaussian state
        n_s: Number of shots (>= 2)
        master_seed: Seed of the whole ensemble
        workers: Thread count; results are merged by shot index

    Returns:
        Ensemble: Records and ground-truth initial points
    """
    if n_s < 2:
        raise InsufficientSamplesError(f"ensemble needs n_s >= 2, got {n_s}")
    config = ensure_validated(config)
    logger.info(f"🚀 Simulating {n_s} shots (nt={config.grid.nt}, seed={master_seed})")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shots = list(pool.map(
                lambda k: simulate_shot(config, state, master_seed, k), range(n_s)
            ))
    else:
        shots = list(iter_ensemble(config, state, n_s, master_seed))

    if n_s < 10:
        logger.warning(f"⚠️  only {n_s} shots: covariance estimates have {n_s - 1} degrees of freedom")

    return Ensemble(
        records=[r for r, _ in shots],
        initial_points=np.vstack([p for _, p in shots]),
        master_seed=master_seed,
        grid=config.grid,
    )


def stationary_occupation(config: SystemConfig, i: int) -> float:
    """Equilibrium ⟨a†a⟩ of oscillator i under thermal and backaction diffusion"""
    config = ensure_validated(config)
    gamma = config.oscillators[i].gamma
    if gamma <= 0:
        return float("inf")
    d = config.derived
    return (2.0 * d.thermal_rate[i] + d.backaction_rate[i]) / (2.0 * gamma) - 0.5
