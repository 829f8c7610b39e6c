"""
Filter Banks
Family constructors, estimate application and filter spectra
"""

from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from app.models.filters import FilterBank, FilterFamily
from app.models.records import HomodyneRecord
from app.models.system import SystemConfig
from app.modules.filters.response import riemann_sum
from app.modules.registry import get_fully_loaded_registry
from app.core.config import settings
from app.core.exceptions import ConfigValidationError, GridMismatchError, IllConditionedError
from app.core.logging import get_logger

logger = get_logger(__name__)


def build_bank(
    config: SystemConfig,
    family: Union[FilterFamily, str],
    options: Optional[Dict[str, Any]] = None,
    check_condition: bool = True
) -> FilterBank:
    """
    Build a bank of the given family through the designer registry

    Args:
        config: System configuration
        family: ols | exp | gls | avg
        options: Family options (exp: gammas; gls: decimation, budget_bytes)
        check_condition: Refuse ill-conditioned J

    Returns:
        FilterBank: Immutable bank
    """
    try:
        family = FilterFamily(family)
    except ValueError:
        raise ConfigValidationError("family", "one of " + ", ".join(f.value for f in FilterFamily), family)

    designer = get_fully_loaded_registry().get_by_family(family)
    bank = designer.build(config, options, check_condition=check_condition)
    logger.info(f"✓ Built {bank.label()} filter bank: {bank.dim} rows x {bank.nt} samples, cond(J)={bank.cond:.3g}")
    return bank


def ols_filters(config: SystemConfig) -> FilterBank:
    """Ordinary least-squares bank: m_i = r_i"""
    return build_bank(config, FilterFamily.OLS)


def exp_filters(config: SystemConfig, gamma_per_osc: Union[str, Sequence[float]] = "auto") -> FilterBank:
    """Exponential bank with one decay rate per oscillator (rad/s) or 'auto'"""
    return build_bank(config, FilterFamily.EXP, {"gammas": gamma_per_osc})


def gls_filters(
    config: SystemConfig,
    decimation: Optional[int] = None,
    budget_bytes: Optional[int] = None
) -> FilterBank:
    """Generalized least-squares bank whitening the two-time noise matrix"""
    return build_bank(config, FilterFamily.GLS, {"decimation": decimation, "budget_bytes": budget_bytes})


def avg_filters(config: SystemConfig) -> FilterBank:
    """Broadening-averaged bank normalized by ⟨J⟩"""
    return build_bank(config, FilterFamily.AVG)


def _require_conditioned(bank: FilterBank):
    if not bank.cond <= settings.COND_LIMIT:
        raise IllConditionedError(bank.cond, settings.COND_LIMIT)


def raw_outputs(bank: FilterBank, samples: np.ndarray) -> np.ndarray:
    """Unnormalized filter outputs Δt·Σ m(t_n) S(t_n) for one record or rows of records"""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != bank.nt:
        raise GridMismatchError(f"record length {samples.shape[-1]} != bank length {bank.nt}")
    return riemann_sum(bank.m, samples, bank.grid.dt)


def estimate(bank: FilterBank, record: Union[HomodyneRecord, np.ndarray]) -> np.ndarray:
    """
    Unbiased quadrature estimate q̂ = J⁻¹·Δt·Σ m(t_n) S(t_n)

    Args:
        bank: Filter bank
        record: Homodyne record (or its raw samples)

    Returns:
        np.ndarray: 2N-vector (X̂₁, P̂₁, X̂₂, ...)
    """
    _require_conditioned(bank)
    samples = record.samples if isinstance(record, HomodyneRecord) else record
    return np.linalg.solve(bank.J, raw_outputs(bank, samples))


def estimate_many(
    bank: FilterBank,
    records: Union[Iterable[HomodyneRecord], np.ndarray]
) -> np.ndarray:
    """
    Estimates of many records, shape (n_s, 2N)

    Accepts records or a (n_s, nt) sample matrix.
    """
    _require_conditioned(bank)
    if isinstance(records, np.ndarray):
        samples = np.atleast_2d(records)
    else:
        samples = np.vstack([r.samples for r in records])
    raw = raw_outputs(bank, samples)
    return np.linalg.solve(bank.J, raw).T


def filter_spectrum(bank: FilterBank, row: int, oversample: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """
    Amplitude spectrum of one normalized filter row

    Args:
        bank: Filter bank
        row: Row index (2i for X̂_i, 2i+1 for P̂_i)
        oversample: Zero-padding factor of the FFT

    Returns:
        Tuple: (frequencies in Hz, |FFT| of J⁻¹mΔt)
    """
    if not 0 <= row < bank.dim:
        raise ConfigValidationError("row", f"0 <= row < {bank.dim}", row)
    weights = bank.normalized_weights()[row]
    n_fft = int(oversample) * bank.nt
    amplitude = np.abs(np.fft.rfft(weights, n=n_fft))
    frequencies = np.fft.rfftfreq(n_fft, d=bank.grid.dt)
    return frequencies, amplitude


def notch_frequency(
    bank: FilterBank,
    row: int,
    band_hz: Tuple[float, float],
    oversample: int = 4
) -> float:
    """Frequency (Hz) of the amplitude minimum of a filter row inside a band"""
    frequencies, amplitude = filter_spectrum(bank, row, oversample)
    lo, hi = sorted(band_hz)
    mask = (frequencies >= lo) & (frequencies <= hi)
    if not np.any(mask):
        raise ConfigValidationError("band_hz", "band containing at least one FFT bin", band_hz)
    idx = np.argmin(np.where(mask, amplitude, np.inf))
    return float(frequencies[idx])
