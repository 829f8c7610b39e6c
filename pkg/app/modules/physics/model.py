"""
Core Model Operations
Cooperativity, shot noise, sideband correction and config validation
"""

import hashlib
import json
import math
from itertools import combinations
from typing import List, Tuple

from app.models.system import (
    CavityParams,
    DerivedQuantities,
    OscillatorParams,
    ResolutionEntry,
    SystemConfig,
)
from app.core.exceptions import (
    ConfigValidationError,
    ModelValidityError,
    NoProbeLightError,
    StepSizeError,
    UndefinedCooperativityError,
)
from app.core.logging import get_logger

logger = get_logger(__name__)

# Minimum ratio of fs to the highest oscillator frequency (Hz)
STEP_GUARD_FACTOR = 20.0
# Resolved-sideband validity: κ must exceed this multiple of Γ
SIDEBAND_VALIDITY_FACTOR = 100.0
HIGH_Q_FACTOR = 10.0


def sideband_correction(osc: OscillatorParams, cav: CavityParams) -> Tuple[float, float]:
    """
    Effective coupling and phase delay from the finite cavity linewidth

    Args:
        osc: Oscillator parameters
        cav: Cavity parameters

    Returns:
        Tuple[float, float]: (g_eff, phi) with g_eff = gκ/√(κ²+ω²), phi = atan(ω/κ)
    """
    if cav.kappa <= SIDEBAND_VALIDITY_FACTOR * osc.gamma:
        raise ModelValidityError(
            f"resolved-sideband regime outside model validity: kappa={cav.kappa:.4g} "
            f"<= {SIDEBAND_VALIDITY_FACTOR:g}*gamma={osc.gamma:.4g}"
        )
    return _effective_coupling(osc, cav)


def _effective_coupling(osc: OscillatorParams, cav: CavityParams) -> Tuple[float, float]:
    if osc.omega == 0.0:
        return osc.g, 0.0
    g_eff = osc.g * cav.kappa / math.hypot(cav.kappa, osc.omega)
    return g_eff, math.atan(osc.omega / cav.kappa)


def backaction_rate(osc: OscillatorParams, cav: CavityParams) -> float:
    """Raw backaction diffusion rate 4·n̄·g_eff²/κ (defined for Γ = 0 as well)"""
    g_eff, _ = _effective_coupling(osc, cav)
    return 4.0 * cav.nbar * g_eff ** 2 / cav.kappa


def thermal_rate(osc: OscillatorParams) -> float:
    """Per-quadrature thermal diffusion rate Γ(ν+1/2) plus extra diffusion"""
    return osc.gamma * (osc.nu + 0.5) + osc.extra_diffusion


def cooperativity(osc: OscillatorParams, cav: CavityParams) -> float:
    """
    Measurement cooperativity C = 4·n̄·g_eff²/(κΓ)

    Raises:
        UndefinedCooperativityError: for an undamped oscillator
    """
    if osc.gamma <= 0.0:
        raise UndefinedCooperativityError(
            "undamped oscillator: cooperativity undefined; use raw diffusion rate"
        )
    return backaction_rate(osc, cav) / osc.gamma


def shot_noise_psd(cav: CavityParams) -> float:
    """
    Normalized two-sided shot-noise PSD of the homodyne signal

    Returns:
        float: κ/(8·ε·n̄)
    """
    if cav.nbar <= 0.0:
        raise NoProbeLightError("no probe light: infinite shot noise")
    if cav.epsilon <= 0.0:
        raise ConfigValidationError("epsilon", "0 < epsilon <= 1", cav.epsilon)
    return cav.kappa / (8.0 * cav.epsilon * cav.nbar)


def coupling_for_cooperativity(
    C: float,
    omega: float,
    gamma: float,
    cav: CavityParams
) -> float:
    """
    Back-solve the bare coupling g that yields cooperativity C

    g_eff² = CκΓ/(4n̄), then g = g_eff·√(κ²+ω²)/κ
    """
    if gamma <= 0.0:
        raise UndefinedCooperativityError(
            "undamped oscillator: cooperativity undefined; specify g directly"
        )
    if cav.nbar <= 0.0:
        raise NoProbeLightError("no probe light: cannot realize a cooperativity")
    g_eff = math.sqrt(C * cav.kappa * gamma / (4.0 * cav.nbar))
    return g_eff * math.hypot(cav.kappa, omega) / cav.kappa


def _check_bounds(config: SystemConfig):
    cav = config.cavity
    if not cav.kappa > 0:
        raise ConfigValidationError("cavity.kappa", "kappa > 0", cav.kappa)
    if not cav.nbar >= 0:
        raise ConfigValidationError("cavity.nbar", "nbar >= 0", cav.nbar)
    if not 0 < cav.epsilon <= 1:
        raise ConfigValidationError("cavity.epsilon", "0 < epsilon <= 1", cav.epsilon)
    if cav.detuning != 0.0:
        raise ConfigValidationError("cavity.detuning", "detuning == 0", cav.detuning)

    if not config.oscillators:
        raise ConfigValidationError("oscillators", "at least one oscillator")

    for i, osc in enumerate(config.oscillators):
        prefix = f"oscillators[{i}]"
        if not abs(osc.omega) > 0:
            raise ConfigValidationError(f"{prefix}.omega", "|omega| > 0", osc.omega)
        if not osc.gamma >= 0:
            raise ConfigValidationError(f"{prefix}.gamma", "gamma >= 0", osc.gamma)
        if not osc.g > 0:
            raise ConfigValidationError(f"{prefix}.g", "g > 0", osc.g)
        if not osc.nu >= 0:
            raise ConfigValidationError(f"{prefix}.nu", "nu >= 0", osc.nu)
        if not osc.sigma >= 0:
            raise ConfigValidationError(f"{prefix}.sigma", "sigma >= 0", osc.sigma)
        if not osc.extra_diffusion >= 0:
            raise ConfigValidationError(
                f"{prefix}.extra_diffusion", "extra_diffusion >= 0", osc.extra_diffusion
            )

    grid = config.grid
    if not grid.fs > 0:
        raise ConfigValidationError("grid.fs", "fs > 0", grid.fs)
    if not grid.tf > 0:
        raise ConfigValidationError("grid.tf", "tf > 0", grid.tf)
    if grid.nt < 2:
        raise ConfigValidationError("grid.nt", "round(fs*tf) >= 2", grid.nt)

    max_freq_hz = max(abs(o.omega) for o in config.oscillators) / (2 * math.pi)
    if not grid.fs > STEP_GUARD_FACTOR * max_freq_hz:
        raise StepSizeError(
            f"grid.fs={grid.fs:.4g} Hz must exceed {STEP_GUARD_FACTOR:g}*max|omega|/2pi"
            f"={STEP_GUARD_FACTOR * max_freq_hz:.4g} Hz"
        )


def resolution_report(config: SystemConfig) -> List[ResolutionEntry]:
    """Pairwise |ω_i - ω_j| in units of the pair's mean damping rate"""
    entries = []
    for i, j in combinations(range(config.n_modes), 2):
        a, b = config.oscillators[i], config.oscillators[j]
        delta = abs(a.omega - b.omega)
        mean_gamma = 0.5 * (a.gamma + b.gamma)
        ratio = delta / mean_gamma if mean_gamma > 0 else None
        entries.append(ResolutionEntry(i=i, j=j, delta=delta, delta_over_gamma=ratio))
    return entries


def validate(config: SystemConfig) -> SystemConfig:
    """
    Check every invariant and cache the derived quantities

    Args:
        config: Raw or already validated configuration

    Returns:
        SystemConfig: Copy carrying DerivedQuantities
    """
    _check_bounds(config)
    cav = config.cavity

    g_eff, phi, coop, ba, th, high_q = [], [], [], [], [], []
    for i, osc in enumerate(config.oscillators):
        ge, ph = sideband_correction(osc, cav)
        g_eff.append(ge)
        phi.append(ph)
        ba.append(4.0 * cav.nbar * ge ** 2 / cav.kappa)
        th.append(thermal_rate(osc))
        coop.append(ba[-1] / osc.gamma if osc.gamma > 0 else None)

        ok = abs(osc.omega) >= HIGH_Q_FACTOR * osc.gamma
        high_q.append(ok)
        if not ok:
            logger.warning(
                f"⚠️  oscillator {i}: |omega| < {HIGH_Q_FACTOR:g}*gamma, "
                f"analytic high-Q results lose accuracy"
            )

    psd = shot_noise_psd(cav) if cav.nbar > 0 else None
    resolution = resolution_report(config)
    for entry in resolution:
        if entry.delta_over_gamma is not None:
            logger.info(f"ℹ️  resolution osc{entry.i}-osc{entry.j}: δ/Γ = {entry.delta_over_gamma:.3g}")

    derived = DerivedQuantities(
        g_eff=g_eff,
        phi=phi,
        cooperativity=coop,
        backaction_rate=ba,
        thermal_rate=th,
        shot_noise_psd=psd,
        resolution=resolution,
        high_q=high_q,
    )
    return config.model_copy(update={"derived": derived})


def ensure_validated(config: SystemConfig) -> SystemConfig:
    """Return the config unchanged if validated, else validate it"""
    return config if config.is_validated else validate(config)


def require_shot_noise(config: SystemConfig) -> float:
    """Shot-noise PSD of a validated config, raising without probe light"""
    config = ensure_validated(config)
    if config.derived.shot_noise_psd is None:
        raise NoProbeLightError("no probe light: infinite shot noise")
    return config.derived.shot_noise_psd


def config_hash(config: SystemConfig) -> str:
    """sha256 of the canonical JSON of the physical parameters"""
    payload = config.model_dump(exclude={"derived"})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
