"""
Report Writer
CSV tables with JSON provenance sidecars
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
import pydantic
import scipy

from app import __version__
from app.core.config import settings
from app.core.exceptions import RecordIOError
from app.core.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.10g"
# Written for values a failed sweep point could not compute
MISSING_VALUE = "nan"


def versions() -> Dict[str, str]:
    """Versions of the packages that determine numerical results"""
    return {
        "optoretro": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


class ReportWriter:
    """
    Writes the outputs of one CLI run into a directory

    Output is a pure function of the inputs: no timestamps, sorted JSON keys
    and a fixed float format.
    """

    def __init__(self, output_dir: Optional[Union[str, Path]] = None, provenance: Optional[Dict[str, Any]] = None):
        self.output_dir = Path(output_dir or settings.OUTPUT_DIR)
        self.provenance = {"versions": versions(), **(provenance or {})}
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise RecordIOError(f"cannot create output directory {self.output_dir}: {e}")
        self.written = []

    def write_table(self, name: str, frame: pd.DataFrame, sidecar: bool = True) -> Path:
        """Write `name`.csv and, by default, its `name`.json provenance sidecar"""
        path = self.output_dir / f"{name}.csv"
        try:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep=MISSING_VALUE)
        except OSError as e:
            raise RecordIOError(f"cannot write {path}: {e}")
        self.written.append(path)
        if sidecar:
            self.write_json(name, {"table": path.name, "columns": list(frame.columns), "rows": len(frame)})
        logger.info(f"💾 {path} ({len(frame)} rows)")
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        """Write `name`.json with the run provenance attached"""
        path = self.output_dir / f"{name}.json"
        document = {"provenance": self.provenance, **payload}
        try:
            path.write_text(json.dumps(document, indent=2, sort_keys=True, default=_jsonable) + "\n")
        except OSError as e:
            raise RecordIOError(f"cannot write {path}: {e}")
        self.written.append(path)
        return path

    def write_matrix(self, name: str, matrix: np.ndarray, labels: Optional[list] = None) -> Path:
        """Square matrix as a labeled CSV table"""
        matrix = np.atleast_2d(matrix)
        labels = labels or quadrature_labels(matrix.shape[0] // 2)
        frame = pd.DataFrame(matrix, columns=labels)
        frame.insert(0, "row", labels)
        return self.write_table(name, frame, sidecar=False)


def quadrature_labels(n_modes: int) -> list:
    """X1, P1, X2, P2, ..."""
    return [f"{q}{i + 1}" for i in range(n_modes) for q in ("X", "P")]
