"""
Spectral Estimation
Welch PSD of homodyne records normalized to the shot-noise level
"""

from typing import Optional, Sequence, Union

import numpy as np
from scipy.signal import welch

from app.models.records import Ensemble, HomodyneRecord, PSDResult
from app.models.system import SystemConfig
from app.modules.physics.model import ensure_validated, require_shot_noise
from app.core.exceptions import SpectralError
from app.core.logging import get_logger

logger = get_logger(__name__)

WINDOW = "hann"


def _as_matrix(records: Union[Ensemble, Sequence[HomodyneRecord], np.ndarray]) -> np.ndarray:
    if isinstance(records, Ensemble):
        return records.samples_matrix()
    if isinstance(records, np.ndarray):
        return np.atleast_2d(records)
    return np.vstack([r.samples for r in records])


def estimate_psd(
    records: Union[Ensemble, Sequence[HomodyneRecord], np.ndarray],
    segment_length: int,
    shot_noise_psd: float,
    fs: float
) -> PSDResult:
    """
    Welch-averaged one-sided PSD divided by the one-sided shot-noise level

    Hann window, 50% overlap, constant detrend; each record is averaged over its
    segments and the records are averaged together. White noise of two-sided
    density P_SN has one-sided density 2·P_SN, so pure shot noise returns 1.

    Args:
        records: Records (or an (n_s, nt) matrix)
        segment_length: Samples per Welch segment
        shot_noise_psd: Two-sided shot-noise PSD P_SN
        fs: Sample rate (Hz)

    Returns:
        PSDResult: Frequencies (Hz) and normalized PSD
    """
    data = _as_matrix(records)
    if data.shape[0] < 1:
        raise SpectralError("PSD needs at least one record")
    nt = data.shape[1]
    if segment_length > nt:
        raise SpectralError(f"segment length {segment_length} longer than record ({nt} samples)")
    if segment_length < 2:
        raise SpectralError(f"segment length must be >= 2, got {segment_length}")

    freqs, pxx = welch(
        data,
        fs=fs,
        window=WINDOW,
        nperseg=segment_length,
        scaling="density",
        return_onesided=True,
        axis=-1,
    )
    psd = pxx.mean(axis=0) / (2.0 * shot_noise_psd)

    logger.debug(f"PSD from {data.shape[0]} record(s), nperseg={segment_length}")
    return PSDResult(
        frequencies=freqs,
        psd=psd,
        n_records=data.shape[0],
        segment_length=segment_length,
    )


def estimate_config_psd(
    config: SystemConfig,
    records: Union[Ensemble, Sequence[HomodyneRecord], np.ndarray],
    n_segments: int = 8
) -> PSDResult:
    """estimate_psd with P_SN and fs taken from the config and nt // n_segments samples per segment"""
    config = ensure_validated(config)
    segment_length = config.grid.nt // max(1, n_segments)
    return estimate_psd(records, segment_length, require_shot_noise(config), config.grid.fs)


def analytic_psd(config: SystemConfig, frequencies: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Stationary model PSD over the shot-noise floor (floor = 1)

    Each damped oscillator adds 2 g_eff² S_X(2πf)/P_SN with
    S_X(Ω) = (D/4)[L(Ω−ω) + L(Ω+ω)], L(x) = 1/((Γ/2)² + x²) and
    D = 2·thermal + backaction. Cross terms from the shared bath are ignored.
    """
    config = ensure_validated(config)
    psd_sn = require_shot_noise(config)
    if frequencies is None:
        frequencies = np.fft.rfftfreq(config.grid.nt, d=config.grid.dt)
    w = 2 * np.pi * np.asarray(frequencies, dtype=float)

    model = np.ones_like(w)
    d = config.derived
    for i, osc in enumerate(config.oscillators):
        if osc.gamma <= 0:
            continue
        diffusion = 2.0 * d.thermal_rate[i] + d.backaction_rate[i]
        half = (osc.gamma / 2) ** 2
        s_x = diffusion / 4.0 * (1.0 / (half + (w - osc.omega) ** 2) + 1.0 / (half + (w + osc.omega) ** 2))
        model += 2.0 * d.g_eff[i] ** 2 * s_x / psd_sn
    return model
