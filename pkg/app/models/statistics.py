"""
Statistics Models
Bias covariances, sample covariances and inferred states
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


def _frozen(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


def _tolist(value):
    return None if value is None else np.asarray(value).tolist()


class NoiseCovarianceSet(BaseModel):
    """M, T and B in phonon-occupation units, shape (2N, 2N) each"""

    M: np.ndarray = Field(..., description="Shot-noise imprecision")
    T: np.ndarray = Field(..., description="Thermal diffusion bias")
    B: np.ndarray = Field(..., description="Backaction diffusion bias")
    variant: str = Field(default="standard", description="standard | primed")
    family: Optional[str] = Field(default=None, description="Bank label the set belongs to")
    exact_backaction: bool = Field(default=True, description="B from the PM kernel (else RWA)")
    config_hash: Optional[str] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("M", "T", "B", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    @property
    def n_modes(self) -> int:
        return self.dim // 2

    def total(self) -> np.ndarray:
        return self.M + self.T + self.B

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 block of the total between modes i and j"""
        return self.total()[2 * i:2 * i + 2, 2 * j:2 * j + 2]

    @property
    def delta_n(self) -> List[float]:
        """Added occupation of every oscillator"""
        return [0.5 * float(np.trace(self.block(i, i))) for i in range(self.n_modes)]

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "family": self.family,
            "exact_backaction": self.exact_backaction,
            "config_hash": self.config_hash,
            "M": self.M.tolist(),
            "T": self.T.tolist(),
            "B": self.B.tolist(),
            "delta_n": self.delta_n,
        }


class CovarianceEstimate(BaseModel):
    """Sample covariance of an estimate ensemble with Wishart errors"""

    mean: np.ndarray
    sigma: np.ndarray = Field(..., description="Unbiased sample covariance")
    se: np.ndarray = Field(..., description="Element-wise standard errors")
    n_s: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("mean", "sigma", "se", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @property
    def dof(self) -> int:
        return self.n_s - 1

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "n_s": self.n_s,
            "dof": self.dof,
            "mean": self.mean.tolist(),
            "sigma": self.sigma.tolist(),
            "se": self.se.tolist(),
        }


class InferredState(BaseModel):
    """Initial-state covariance after removing the estimator biases"""

    mean: np.ndarray
    cov: np.ndarray
    se: np.ndarray
    symplectic_eigenvalues: np.ndarray
    physical: bool
    violations: List[str] = Field(default_factory=list)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("mean", "cov", "se", "symplectic_eigenvalues", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
            "se": self.se.tolist(),
            "symplectic_eigenvalues": self.symplectic_eigenvalues.tolist(),
            "physical": self.physical,
            "violations": self.violations,
        }


class BroadenedResult(BaseModel):
    """Second moments recovered under shot-to-shot frequency fluctuations"""

    second_moments: np.ndarray = Field(..., description="⟨Q_k Q_l⟩")
    mean: np.ndarray = Field(..., description="⟨Q⟩ = ⟨J⟩⁻¹⟨q⟩ with ⟨J⟩-normalized estimates")
    cov: np.ndarray = Field(..., description="⟨QQᵀ⟩ − ⟨Q⟩⟨Q⟩ᵀ")
    se: Optional[np.ndarray] = None
    J_avg: np.ndarray
    noise: NoiseCovarianceSet = Field(..., description="Primed matrices M', T', B'")
    smallest_singular_value: float
    n_draws: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("second_moments", "mean", "cov", "J_avg", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @field_validator("se", mode="before")
    @classmethod
    def _coerce_optional(cls, v):
        return None if v is None else _frozen(v)

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "second_moments": self.second_moments.tolist(),
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
            "se": _tolist(self.se),
            "J_avg": self.J_avg.tolist(),
            "noise": self.noise.to_json_dict(),
            "smallest_singular_value": self.smallest_singular_value,
            "n_draws": self.n_draws,
        }


class RetrodictionReport(BaseModel):
    """Everything one retrodiction run produces"""

    family: str
    estimates: np.ndarray = Field(..., description="(n_s, 2N) quadrature estimates")
    covariance: CovarianceEstimate
    noise: NoiseCovarianceSet
    inferred: InferredState
    broadened: Optional[BroadenedResult] = None
    mean_square: Optional[Any] = Field(default=None, description="pandas table of model vs empirical ⟨S²⟩")
    truth_cov: Optional[np.ndarray] = Field(default=None, description="Known initial covariance of simulated runs")
    master_seed: Optional[int] = None
    config_hash: str

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("estimates", mode="before")
    @classmethod
    def _coerce(cls, v):
        return _frozen(v)

    @property
    def physical(self) -> bool:
        return self.inferred.physical

    def closure_z(self) -> Optional[np.ndarray]:
        """(inferred − known)/SE when the initial state is known"""
        if self.truth_cov is None:
            return None
        return (self.inferred.cov - self.truth_cov) / self.inferred.se
