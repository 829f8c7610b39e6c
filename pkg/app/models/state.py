"""
Gaussian State Model
Mean vector and covariance over the 2N quadratures (X1, P1, X2, P2, ...)
"""

from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Absolute symmetry tolerance relative to the covariance scale
SYMMETRY_TOL = 1e-12


def _frozen_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


class GaussianState(BaseModel):
    """
    Gaussian state of N modes in zero-point units
    Vacuum variance is 1/2 per quadrature
    """

    mean: np.ndarray = Field(..., description="2N quadrature means")
    cov: np.ndarray = Field(..., description="2N x 2N symmetric covariance")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("mean", mode="before")
    @classmethod
    def _coerce_mean(cls, v):
        return _frozen_array(np.ravel(v))

    @field_validator("cov", mode="before")
    @classmethod
    def _coerce_cov(cls, v):
        return _frozen_array(v)

    @model_validator(mode="after")
    def _check_shapes(self):
        dim = self.mean.shape[0]
        if dim % 2 != 0:
            raise ValueError("mean must have an even length (X, P per mode)")
        if self.cov.shape != (dim, dim):
            raise ValueError(f"cov shape {self.cov.shape} does not match mean length {dim}")
        scale = max(1.0, float(np.max(np.abs(self.cov))) if self.cov.size else 1.0)
        if not np.allclose(self.cov, self.cov.T, atol=SYMMETRY_TOL * scale, rtol=0.0):
            raise ValueError("cov must be symmetric")
        return self

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 covariance block between modes i and j"""
        return self.cov[2 * i:2 * i + 2, 2 * j:2 * j + 2]

    def second_moments(self) -> np.ndarray:
        """⟨Q Qᵀ⟩ = cov + mean meanᵀ"""
        return self.cov + np.outer(self.mean, self.mean)

    def to_json_dict(self) -> Dict[str, Any]:
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "GaussianState":
        return cls(mean=data["mean"], cov=data["cov"])
