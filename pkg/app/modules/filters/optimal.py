"""
Exponential Filter Optimum
Optimal decay rates and closed-form added noise of single-oscillator filters
"""

import math
from typing import Dict, List

from app.models.system import OscillatorParams, SystemConfig
from app.modules.physics.model import ensure_validated
from app.core.exceptions import ConfigValidationError


def optimal_gamma(osc: OscillatorParams, C: float, nu: float, epsilon: float) -> float:
    """
    Decay rate minimizing the total added noise of an exponential filter

    Returns:
        float: Γ·√(1 + 4εC(C + 2ν + 1))
    """
    if C < 0:
        raise ConfigValidationError("C", "C >= 0", C)
    return osc.gamma * math.sqrt(1.0 + 4.0 * epsilon * C * (C + 2.0 * nu + 1.0))


def optimal_gamma_from_rates(
    gamma: float,
    thermal: float,
    backaction: float,
    epsilon: float
) -> float:
    """
    Rate form √(Γ² + 4ε·ba·(ba + 2·th)), valid for undamped oscillators

    With th = Γ(ν+1/2) and ba = CΓ it equals optimal_gamma.
    """
    return math.sqrt(gamma ** 2 + 4.0 * epsilon * backaction * (backaction + 2.0 * thermal))


def auto_gammas(config: SystemConfig) -> List[float]:
    """Optimal decay rate of every oscillator from its cached rates"""
    config = ensure_validated(config)
    d = config.derived
    gammas = [
        optimal_gamma_from_rates(osc.gamma, d.thermal_rate[i], d.backaction_rate[i], config.cavity.epsilon)
        for i, osc in enumerate(config.oscillators)
    ]
    for i, g in enumerate(gammas):
        if g <= 0:
            raise ConfigValidationError(
                f"oscillators[{i}]", "undamped oscillator without backaction has no optimal decay"
            )
    return gammas


def sql_floor(epsilon: float) -> float:
    """Minimum total added occupation 1/(2√ε) of phase-insensitive retrodiction"""
    return 1.0 / (2.0 * math.sqrt(epsilon))


def analytic_exp_added_noise(
    C: float,
    nu: float,
    epsilon: float,
    gamma_ratio: float
) -> Dict[str, float]:
    """
    High-Q, long-record added occupations of an exponential filter

    Args:
        C: Cooperativity
        nu: Bath occupation
        epsilon: Detection efficiency
        gamma_ratio: γ/Γ

    Returns:
        Dict: thermal (ν+1/2)Γ/γ, backaction (C/2)Γ/γ,
        shot_noise (Γ+γ)²/(8εCΓγ) and their total
    """
    x = gamma_ratio
    thermal = (nu + 0.5) / x
    backaction = 0.5 * C / x
    shot = math.inf if C == 0 else (1.0 + x) ** 2 / (8.0 * epsilon * C * x)
    return {
        "thermal": thermal,
        "backaction": backaction,
        "shot_noise": shot,
        "total": thermal + backaction + shot,
    }
