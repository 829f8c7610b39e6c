"""
Sweep Models
Axis definitions, sweep requests and tabular results
"""

from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Parameters a sweep axis may scan
AXIS_PARAMETERS = {
    "cooperativity": "C of every swept oscillator",
    "gamma_ratio": "exponential filter decay rate γ/Γ",
    "delta_ratio": "frequency separation δ/Γ of two oscillators",
    "nu": "bath occupation",
    "epsilon": "detection efficiency",
}


class SweepTask(str, Enum):
    """What each sweep point computes"""
    ANALYTIC = "analytic"
    MC = "mc"
    BOTH = "both"


class SweepAxis(BaseModel):
    """One swept parameter and its grid"""

    name: str = Field(..., description="Parameter name, see AXIS_PARAMETERS")
    values: List[float] = Field(..., description="Grid values")
    scale: str = Field(default="log", description="log | linear")

    model_config = ConfigDict(frozen=True)

    @field_validator("values")
    @classmethod
    def _non_empty(cls, v):
        if not v:
            raise ValueError("sweep axis must have at least one value")
        return [float(x) for x in v]

    @classmethod
    def log_grid(cls, name: str, start: float, stop: float, per_decade: int = 40) -> "SweepAxis":
        """Logarithmic grid with per_decade points per factor of ten, endpoints included"""
        if start <= 0 or stop <= 0:
            raise ValueError("log grid bounds must be positive")
        decades = abs(np.log10(stop / start))
        n = max(2, int(round(decades * per_decade)) + 1)
        return cls(name=name, values=np.geomspace(start, stop, n).tolist(), scale="log")

    @classmethod
    def linear_grid(cls, name: str, start: float, stop: float, n: int) -> "SweepAxis":
        return cls(name=name, values=np.linspace(start, stop, max(1, n)).tolist(), scale="linear")

    def __len__(self) -> int:
        return len(self.values)


class SweepSpec(BaseModel):
    """A parameter sweep request"""

    axes: List[SweepAxis]
    task: SweepTask = SweepTask.ANALYTIC
    master_seed: int = 0
    n_shots: int = Field(default=1000, description="Shots per Monte Carlo spot check")
    output: Optional[str] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_axes(self):
        if not self.axes:
            raise ValueError("sweep needs at least one axis")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axes: {names}")
        return self

    def axis(self, name: str) -> Optional[SweepAxis]:
        return next((a for a in self.axes if a.name == name), None)

    def points(self) -> List[Dict[str, float]]:
        """Cartesian grid, last axis fastest"""
        grids = np.meshgrid(*[a.values for a in self.axes], indexing="ij")
        flat = [g.ravel() for g in grids]
        return [
            {axis.name: float(flat[k][i]) for k, axis in enumerate(self.axes)}
            for i in range(flat[0].size)
        ]


class SweepResult(BaseModel):
    """One row per grid point plus derived summary tables"""

    name: str
    rows: List[Dict[str, Any]]
    summary: List[Dict[str, Any]] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.rows if r.get("status") != "ok")

    @property
    def all_ok(self) -> bool:
        return self.n_failed == 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.summary)
