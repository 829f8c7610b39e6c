"""
Filter Models
Response functions and matched-filter banks
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.models.system import SamplingGrid


class FilterFamily(str, Enum):
    """Filter families"""
    OLS = "ols"
    EXP = "exp"
    GLS = "gls"
    AVG = "avg"


def _frozen(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


class ResponseFunction(BaseModel):
    """Quadrature impulse response of one oscillator, shape (2, nt)"""

    index: int = Field(..., description="Oscillator index")
    values: np.ndarray = Field(..., description="Rows: X response, P response")
    averaged: bool = False
    phi: float = 0.0

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("values", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)


class FilterBank(BaseModel):
    """2N temporal weight functions plus their normalization matrix"""

    family: FilterFamily
    m: np.ndarray = Field(..., description="Weight rows, shape (2N, nt)")
    J: np.ndarray = Field(..., description="Normalization matrix (2N x 2N), ⟨J⟩ for AVG")
    cond: float = Field(..., description="Condition number of J")
    grid: SamplingGrid
    gammas: Optional[List[float]] = Field(default=None, description="EXP decay rates (rad/s)")
    decimation: int = Field(default=1, description="Design-grid decimation of GLS banks")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("m", "J", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    @property
    def nt(self) -> int:
        return self.m.shape[1]

    def normalized_weights(self) -> np.ndarray:
        """W = J⁻¹ m Δt, the per-sample weights of the unbiased estimator"""
        return np.linalg.solve(self.J, self.m) * self.grid.dt

    def label(self) -> str:
        if self.family == FilterFamily.EXP and self.gammas:
            return "exp(" + ",".join(f"{g / (2 * np.pi):.4g}Hz" for g in self.gammas) + ")"
        return self.family.value
