"""
Response Correlation Kernels
Closed-form two-time diffusion correlations and their fast quadratic forms
"""

from typing import Tuple

import numpy as np
from scipy.signal import lfilter

from app.models.system import OscillatorParams
from app.core.config import settings
from app.core.logging import get_logger

logger = get_logger(__name__)

# |a_L + a_R|·t below this uses the analytic equal-rate limit
DEGENERATE_TOL = 1e-6
# Below this |x| the series of (e^x − 1)/x is used
SERIES_TOL = 1e-3


def decay_rate(osc: OscillatorParams, omega: float = None) -> complex:
    """a = Γ/2 + iω, so that ρ(t) = e^{-a t}"""
    return osc.gamma / 2 + 1j * (osc.omega if omega is None else omega)


def _phi1(x: np.ndarray) -> np.ndarray:
    """(e^x − 1)/x for complex x, exact at 0"""
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < SERIES_TOL
    safe = np.where(small, 1.0, x)
    out = np.where(small, 0.0, (np.exp(safe) - 1.0) / safe)
    xs = np.where(small, x, 0.0)
    series = 1.0 + xs / 2 + xs ** 2 / 6 + xs ** 3 / 24 + xs ** 4 / 120
    return np.where(small, series, out)


def kernel_integral(a_left: complex, a_right: complex, t, tp) -> np.ndarray:
    """
    I(t, t') = ∫_0^{min(t,t')} e^{-a_L(t−s)} e^{-a_R(t'−s)} ds

    Evaluated as E_lag·m·φ1(−(a_L + a_R)·m) with m = min(t, t') and
    E_lag = e^{-a_L(t−t')} for t > t', e^{-a_R(t'−t)} for t < t', 1 at t = t'.
    This equals [e^{-a_L(t−t')}Θ(t−t') + e^{-a_R(t'−t)}Θ(t'−t) − e^{-a_L t − a_R t'}]/(a_L + a_R)
    with Θ(0) = 1/2, including its equal-rate limit.
    """
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    lag = t - tp
    m = np.minimum(t, tp)
    lag_pos = np.maximum(lag, 0.0)
    lag_neg = np.maximum(-lag, 0.0)
    e_lag = np.exp(-a_left * lag_pos) * np.exp(-a_right * lag_neg)
    return e_lag * m * _phi1(-(a_left + a_right) * m)


def _broadened_integral(
    a_left: complex,
    a_right: complex,
    sigma_left: float,
    sigma_right: float,
    t,
    tp,
    same_mode: bool
) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    lag = t - tp
    if same_mode:
        # the frequency enters only through e^{±iω(t−t')}, so the average is exact
        return kernel_integral(a_left, a_right, t, tp) * np.exp(-0.5 * sigma_left ** 2 * lag ** 2)

    total = a_left + a_right
    t_max = float(np.max(np.maximum(t, tp))) if np.size(t) else 0.0
    if abs(total) * t_max < DEGENERATE_TOL:
        envelope = np.exp(-0.5 * (sigma_left ** 2 * t ** 2 + sigma_right ** 2 * tp ** 2))
        return kernel_integral(a_left, a_right, t, tp) * envelope

    step = np.where(lag > 0, 1.0, np.where(lag < 0, 0.0, 0.5))
    left = np.exp(-a_left * np.maximum(lag, 0.0)) * np.exp(-0.5 * sigma_left ** 2 * lag ** 2) * step
    right = np.exp(-a_right * np.maximum(-lag, 0.0)) * np.exp(-0.5 * sigma_right ** 2 * lag ** 2) * (1.0 - step)
    product = (
        np.exp(-a_left * t - 0.5 * sigma_left ** 2 * t ** 2)
        * np.exp(-a_right * tp - 0.5 * sigma_right ** 2 * tp ** 2)
    )
    return (left + right - product) / total


def pair_rates(
    osc_k: OscillatorParams,
    osc_l: OscillatorParams,
    phi_k: float = 0.0,
    phi_l: float = 0.0,
    plus: bool = False,
    omega_k: float = None,
    omega_l: float = None
) -> Tuple[complex, complex, complex]:
    """
    (a_L, a_R, phase) of the R_kl kernel, or of R⁺_kl when plus is set

    R_kl  = Re[e^{i(φ_l−φ_k)} I(a_k*, a_l)]   (ρ_k* ρ_l products)
    R⁺_kl = Re[e^{i(φ_k+φ_l)} I(a_k, a_l)]    (ρ_k ρ_l products)
    """
    a_k = decay_rate(osc_k, omega_k)
    a_l = decay_rate(osc_l, omega_l)
    if plus:
        return a_k, a_l, np.exp(1j * (phi_k + phi_l))
    return np.conj(a_k), a_l, np.exp(1j * (phi_l - phi_k))


def _warn_broadening(osc_k: OscillatorParams, osc_l: OscillatorParams):
    delta = abs(osc_k.omega - osc_l.omega)
    ratio = (osc_k.sigma + osc_l.sigma) / delta if delta > 0 else np.inf
    if ratio > settings.BROADENING_RATIO_WARN:
        logger.warning(
            f"⚠️  broadened kernel: (sigma_k + sigma_l)/|omega_k - omega_l| = {ratio:.3g} "
            f"> {settings.BROADENING_RATIO_WARN:g}, small-broadening approximation degraded"
        )


def response_correlation(
    osc_k: OscillatorParams,
    osc_l: OscillatorParams,
    t,
    tp,
    phi_k: float = 0.0,
    phi_l: float = 0.0,
    broadened: bool = False,
    same_mode: bool = None
) -> np.ndarray:
    """
    R_kl(t, t') = Re ∫_0^{min(t,t')} ρ_k*(t−s) ρ_l(t'−s) ds, ρ(t) = e^{-(Γ/2+iω)t}

    Args:
        osc_k, osc_l: Oscillators
        t, tp: Times (broadcastable arrays, >= 0)
        phi_k, phi_l: Sideband phases of the measured quadratures
        broadened: Average over the Gaussian frequency distributions
        same_mode: Treat k and l as the same oscillator (default: identity check)

    Returns:
        np.ndarray: Real kernel values
    """
    a_left, a_right, phase = pair_rates(osc_k, osc_l, phi_k, phi_l)
    if broadened:
        same = (osc_k is osc_l) if same_mode is None else same_mode
        if not same:
            _warn_broadening(osc_k, osc_l)
        values = _broadened_integral(a_left, a_right, osc_k.sigma, osc_l.sigma, t, tp, same)
    else:
        values = kernel_integral(a_left, a_right, t, tp)
    return np.real(phase * values)


def backaction_kernel(
    osc_k: OscillatorParams,
    osc_l: OscillatorParams,
    t,
    tp,
    phi_k: float = 0.0,
    phi_l: float = 0.0,
    exact: bool = True
) -> np.ndarray:
    """
    Correlation of momentum-driven diffusion per unit backaction rate

    exact: ½(R_kl − R⁺_kl), the product of sine components; otherwise ½R_kl,
    its rotating-wave form.
    """
    a_left, a_right, phase = pair_rates(osc_k, osc_l, phi_k, phi_l)
    value = np.real(phase * kernel_integral(a_left, a_right, t, tp))
    if exact:
        a_left, a_right, phase = pair_rates(osc_k, osc_l, phi_k, phi_l, plus=True)
        value = value - np.real(phase * kernel_integral(a_left, a_right, t, tp))
    return 0.5 * value


def quadratic_form(
    U: np.ndarray,
    V: np.ndarray,
    times: np.ndarray,
    a_left: complex,
    a_right: complex,
    phase: complex
) -> np.ndarray:
    """
    Re[phase · Σ_nm U_in I(t_n, t_m) V_jm] in O(rows·nt)

    The lag terms are causal geometric sums computed with lfilter; the product
    term is an outer product. The equal-rate limit uses reverse cumulative sums,
    since Σ_nm p_n q_m min(n, m) = Σ_{j>=1} P_j Q_j with P_j = Σ_{n>=j} p_n.

    Args:
        U, V: Real weight rows of shape (rows, nt) on the grid `times` (t_0 = 0)
        times: Uniform sample times
        a_left, a_right, phase: Kernel constants from pair_rates

    Returns:
        np.ndarray: (rows_U, rows_V) real matrix
    """
    U = np.atleast_2d(U).astype(complex)
    V = np.atleast_2d(V).astype(complex)
    dt = times[1] - times[0]
    total = a_left + a_right

    if abs(total) * times[-1] < DEGENERATE_TOL:
        p = U * np.exp(-a_left * times)[None, :]
        q = V * np.exp(-a_right * times)[None, :]
        P = np.cumsum(p[:, ::-1], axis=1)[:, ::-1]
        Q = np.cumsum(q[:, ::-1], axis=1)[:, ::-1]
        return np.real(phase * dt * (P[:, 1:] @ Q[:, 1:].T))

    lam_left = np.exp(-a_left * dt)
    lam_right = np.exp(-a_right * dt)
    C = lfilter([1.0], [1.0, -lam_left], V, axis=1)
    D = lfilter([1.0], [1.0, -lam_right], U, axis=1)
    lag_sum = U @ C.T + D @ V.T - U @ V.T
    product = np.outer(U @ np.exp(-a_left * times), V @ np.exp(-a_right * times))
    return np.real(phase * (lag_sum - product) / total)
