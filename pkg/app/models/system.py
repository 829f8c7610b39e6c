"""
System Models
Physical parameters of the cavity, the oscillators and the sampling grid
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class OscillatorParams(BaseModel):
    """One mechanical (or collective spin) oscillator, rates in rad/s"""

    omega: float = Field(..., description="Angular frequency; negative for negative-mass oscillators")
    gamma: float = Field(default=0.0, description="Energy damping rate Γ")
    g: float = Field(..., description="Optomechanical coupling before sideband correction")
    nu: float = Field(default=0.0, description="Thermal bath occupation ν")
    sigma: float = Field(default=0.0, description="Shot-to-shot frequency std σ")
    extra_diffusion: float = Field(
        default=0.0,
        description="Additional incoherent quadrature diffusion rate"
    )
    label: Optional[str] = Field(default=None, description="Display name")

    model_config = ConfigDict(frozen=True)


class CavityParams(BaseModel):
    """Resonantly driven cavity"""

    kappa: float = Field(..., description="Half-linewidth κ (rad/s)")
    nbar: float = Field(..., description="Mean intracavity photon number")
    epsilon: float = Field(default=1.0, description="Total detection efficiency")
    detuning: float = Field(default=0.0, description="Always zero")

    model_config = ConfigDict(frozen=True)


class SamplingGrid(BaseModel):
    """Uniform sampling grid t_n = n / fs"""

    fs: float = Field(..., description="Sample rate (Hz)")
    tf: float = Field(..., description="Record duration (s)")

    model_config = ConfigDict(frozen=True)

    @property
    def nt(self) -> int:
        return int(round(self.fs * self.tf))

    @property
    def dt(self) -> float:
        return 1.0 / self.fs

    def times(self) -> np.ndarray:
        """Sample times t_n = n·Δt, n = 0..nt-1"""
        return np.arange(self.nt) * self.dt

    def decimated(self, factor: int) -> "SamplingGrid":
        """Grid with every factor-th sample of this one"""
        nt_d = (self.nt - 1) // factor + 1
        return SamplingGrid(fs=self.fs / factor, tf=nt_d * factor / self.fs)


class ResolutionEntry(BaseModel):
    """Frequency separation of an oscillator pair in linewidths"""

    i: int
    j: int
    delta: float = Field(..., description="|ω_i - ω_j| (rad/s)")
    delta_over_gamma: Optional[float] = Field(
        default=None,
        description="δ divided by the mean damping; None for undamped pairs"
    )

    model_config = ConfigDict(frozen=True)


class DerivedQuantities(BaseModel):
    """Quantities cached by validation, one entry per oscillator"""

    g_eff: List[float]
    phi: List[float]
    cooperativity: List[Optional[float]] = Field(
        description="None for undamped oscillators"
    )
    backaction_rate: List[float] = Field(description="4·n̄·g_eff²/κ")
    thermal_rate: List[float] = Field(description="Γ(ν+1/2) + extra_diffusion")
    shot_noise_psd: Optional[float] = Field(
        default=None,
        description="κ/(8εn̄); None without probe light"
    )
    resolution: List[ResolutionEntry] = Field(default_factory=list)
    high_q: List[bool] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)


class SystemConfig(BaseModel):
    """Single source of truth for a run"""

    cavity: CavityParams
    oscillators: List[OscillatorParams]
    grid: SamplingGrid
    derived: Optional[DerivedQuantities] = None

    model_config = ConfigDict(frozen=True)

    @property
    def n_modes(self) -> int:
        return len(self.oscillators)

    @property
    def dim(self) -> int:
        """Length of the quadrature vector (X1, P1, X2, P2, ...)"""
        return 2 * len(self.oscillators)

    @property
    def is_validated(self) -> bool:
        return self.derived is not None

    def evolve(self, **updates) -> "SystemConfig":
        """Copy with updated fields; derived quantities are dropped"""
        updates.setdefault("derived", None)
        return self.model_copy(update=updates)

    def with_oscillator(self, index: int, **updates) -> "SystemConfig":
        """Copy with one oscillator's fields replaced"""
        oscillators = list(self.oscillators)
        oscillators[index] = oscillators[index].model_copy(update=updates)
        return self.evolve(oscillators=oscillators)

