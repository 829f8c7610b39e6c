"""
Response Functions
Sampled quadrature impulse responses and the shared quadrature rule
"""

from typing import Optional, Sequence

import numpy as np

from app.models.filters import ResponseFunction
from app.models.system import OscillatorParams, SamplingGrid, SystemConfig
from app.modules.physics.model import ensure_validated


def response(
    osc: OscillatorParams,
    grid: SamplingGrid,
    averaged: bool = False,
    phi: float = 0.0,
    heaviside_zero: float = 0.5,
    index: int = 0,
    omega: Optional[float] = None,
    decay: Optional[float] = None
) -> ResponseFunction:
    """
    r(t_n) = e^{-Γt/2}(cos(ωt − φ), sin(ωt − φ))·Θ(t), optionally × e^{-σ²t²/2}

    Args:
        osc: Oscillator
        grid: Sampling grid
        averaged: Include the dephasing envelope of frequency broadening
        phi: Sideband phase delay of the measured quadrature
        heaviside_zero: Θ(0); 1/2 by convention, 1 for the t→0⁺ limit
        index: Oscillator index stored on the result
        omega: Frequency override (realized frequency of a shot)
        decay: Envelope rate override (Γ by default; γ for exponential filters)

    Returns:
        ResponseFunction: Shape (2, nt)
    """
    t = grid.times()
    w = osc.omega if omega is None else omega
    rate = osc.gamma if decay is None else decay
    envelope = np.exp(-0.5 * rate * t)
    if averaged and osc.sigma > 0:
        envelope = envelope * np.exp(-0.5 * (osc.sigma * t) ** 2)
    envelope[0] *= heaviside_zero

    values = np.vstack([envelope * np.cos(w * t - phi), envelope * np.sin(w * t - phi)])
    return ResponseFunction(index=index, values=values, averaged=averaged, phi=phi)


def response_rows(
    config: SystemConfig,
    grid: Optional[SamplingGrid] = None,
    averaged: bool = False,
    omegas: Optional[Sequence[float]] = None,
    decays: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    Sideband-rotated responses of every oscillator stacked as (2N, nt)

    Sampled with the t→0⁺ origin, matching the simulated signal at t = 0.
    """
    config = ensure_validated(config)
    grid = grid or config.grid
    rows = []
    for i, osc in enumerate(config.oscillators):
        r = response(
            osc,
            grid,
            averaged=averaged,
            phi=config.derived.phi[i],
            heaviside_zero=1.0,
            index=i,
            omega=None if omegas is None else omegas[i],
            decay=None if decays is None else decays[i],
        )
        rows.append(r.values)
    return np.vstack(rows)


def signal_response(
    config: SystemConfig,
    grid: Optional[SamplingGrid] = None,
    averaged: bool = False,
    omegas: Optional[Sequence[float]] = None
) -> np.ndarray:
    """Noiseless signal per unit initial quadrature: √2·g_eff,i·r̃_i, shape (2N, nt)"""
    config = ensure_validated(config)
    scale = np.repeat(np.sqrt(2.0) * np.asarray(config.derived.g_eff), 2)
    return scale[:, None] * response_rows(config, grid, averaged=averaged, omegas=omegas)


def riemann_sum(weights: np.ndarray, values: np.ndarray, dt: float) -> np.ndarray:
    """
    Left-endpoint rule Δt·Σ_n w(t_n) v(t_n)

    The one quadrature rule used both for J and for applying filters to records,
    which keeps the estimator exactly unbiased on the grid.

    Args:
        weights: (rows, nt)
        values: (nt,) or (cols, nt)

    Returns:
        np.ndarray: (rows,) or (rows, cols)
    """
    return dt * (weights @ np.asarray(values).T)
