"""
Record Models
Trajectories, homodyne records and simulated ensembles
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.system import SamplingGrid


def _frozen(value, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


class TrajectorySet(BaseModel):
    """Quadrature time series of every oscillator on one grid"""

    grid: SamplingGrid
    quads: np.ndarray = Field(..., description="Shape (N, 2, nt): X_i(t_n), P_i(t_n)")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("quads", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @model_validator(mode="after")
    def _check_length(self):
        if self.quads.ndim != 3 or self.quads.shape[1] != 2:
            raise ValueError("quads must have shape (N, 2, nt)")
        if self.quads.shape[2] != self.grid.nt:
            raise ValueError(f"trajectory length {self.quads.shape[2]} != grid.nt {self.grid.nt}")
        return self

    def X(self, i: int) -> np.ndarray:
        return self.quads[i, 0]

    def P(self, i: int) -> np.ndarray:
        return self.quads[i, 1]


class HomodyneRecord(BaseModel):
    """One shot of the sampled homodyne signal with its provenance"""

    samples: np.ndarray = Field(..., description="S(t_n), length nt")
    seed: int = Field(..., description="Master seed of the ensemble")
    shot_index: int = Field(default=0, description="Shot index within the ensemble")
    omega_realized: np.ndarray = Field(..., description="Per-oscillator frequency of this shot (rad/s)")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("samples", "omega_realized", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(np.ravel(v))

    @model_validator(mode="after")
    def _check_finite(self):
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("record samples must be finite")
        return self

    @property
    def nt(self) -> int:
        return self.samples.shape[0]


class Ensemble(BaseModel):
    """Simulated shots plus the ground-truth initial points"""

    records: List[HomodyneRecord]
    initial_points: np.ndarray = Field(..., description="Shape (n_s, 2N)")
    master_seed: int
    grid: Optional[SamplingGrid] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def n_shots(self) -> int:
        return len(self.records)

    def samples_matrix(self) -> np.ndarray:
        """Records stacked as rows, shape (n_s, nt)"""
        return np.vstack([r.samples for r in self.records])

    def omega_matrix(self) -> np.ndarray:
        """Realized frequencies, shape (n_s, N)"""
        return np.vstack([r.omega_realized for r in self.records])


class PSDResult(BaseModel):
    """One-sided power spectral density normalized to the shot-noise level"""

    frequencies: np.ndarray = Field(..., description="Hz")
    psd: np.ndarray = Field(..., description="PSD / shot-noise PSD")
    n_records: int
    segment_length: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
