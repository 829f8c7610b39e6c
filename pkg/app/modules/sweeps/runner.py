"""
Sweep Runner
Applies axis values to configurations and evaluates grid points in a worker pool
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from app.models.system import SystemConfig
from app.models.sweeps import AXIS_PARAMETERS, SweepSpec
from app.modules.physics.model import coupling_for_cooperativity, validate
from app.core.config import settings
from app.core.exceptions import RetrodictionError, SweepSpecError
from app.core.logging import get_logger

logger = get_logger(__name__)

PointFunction = Callable[[Dict[str, float]], Dict[str, Any]]


def check_axes(spec: SweepSpec, allowed: Sequence[str]):
    """Every axis must name a parameter this sweep understands"""
    for axis in spec.axes:
        if axis.name not in AXIS_PARAMETERS or axis.name not in allowed:
            raise SweepSpecError(
                f"axis '{axis.name}' not supported here; expected one of {', '.join(allowed)}"
            )


def apply_point(
    base: SystemConfig,
    point: Dict[str, float],
    oscillators: Optional[Sequence[int]] = None
) -> SystemConfig:
    """
    Configuration of one sweep point

    Order: efficiency, separation, occupation, cooperativity, since the coupling
    that realizes C depends on the oscillator frequency and the cavity.

    Args:
        base: Base configuration
        point: Axis values of the point
        oscillators: Oscillators the per-oscillator axes apply to (all by default)

    Returns:
        SystemConfig: Validated configuration
    """
    config = base
    indices = list(range(base.n_modes)) if oscillators is None else list(oscillators)

    if "epsilon" in point:
        config = config.evolve(cavity=config.cavity.model_copy(update={"epsilon": point["epsilon"]}))

    if "delta_ratio" in point:
        if config.n_modes < 2:
            raise SweepSpecError("delta_ratio needs two oscillators")
        ref = config.oscillators[0]
        if ref.gamma <= 0:
            raise SweepSpecError("delta_ratio needs a damped reference oscillator")
        sign = 1.0 if config.oscillators[1].omega >= ref.omega else -1.0
        config = config.with_oscillator(1, omega=ref.omega + sign * point["delta_ratio"] * ref.gamma)

    for i in indices:
        if "nu" in point:
            config = config.with_oscillator(i, nu=point["nu"])
        if "cooperativity" in point:
            osc = config.oscillators[i]
            g = coupling_for_cooperativity(point["cooperativity"], osc.omega, osc.gamma, config.cavity)
            config = config.with_oscillator(i, g=g)

    return validate(config)


def _evaluate(
    fn: PointFunction,
    index: int,
    point: Dict[str, float],
    columns: Sequence[str]
) -> Dict[str, Any]:
    row: Dict[str, Any] = {"index": index, **point}
    row.update(dict.fromkeys(columns, np.nan))
    try:
        row.update(fn(point))
        row["status"] = "ok"
        row["error"] = ""
    except RetrodictionError as e:
        logger.warning(f"⚠️  sweep point {index} {point} failed: {type(e).__name__}: {e}")
        row["status"] = f"error:{type(e).__name__}"
        row["error"] = str(e)
    return row


def run_points(
    fn: PointFunction,
    points: List[Dict[str, float]],
    workers: Optional[int] = None,
    columns: Sequence[str] = ()
) -> List[Dict[str, Any]]:
    """
    Evaluate every point, ordered by grid index regardless of completion order

    Failures of the toolkit's own error types are tagged on their row instead
    of aborting the sweep. Every row carries `columns` (NaN where a point
    failed) plus `status` and `error`, so all rows share one schema.
    """
    workers = workers or settings.SWEEP_WORKERS
    logger.info(f"🚀 Evaluating {len(points)} sweep points on {workers} workers")

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda item: _evaluate(fn, *item, columns), enumerate(points)))
    else:
        rows = [_evaluate(fn, i, p, columns) for i, p in enumerate(points)]

    failed = sum(1 for r in rows if r["status"] != "ok")
    if failed:
        logger.warning(f"⚠️  {failed}/{len(rows)} sweep points failed")
    else:
        logger.info(f"✅ All {len(rows)} sweep points computed")
    return rows


def argmin_row(rows: List[Dict[str, Any]], key: str) -> Optional[Dict[str, Any]]:
    """Successful row with the smallest value of key"""
    ok = [r for r in rows if r.get("status") == "ok" and np.isfinite(r.get(key, np.nan))]
    return min(ok, key=lambda r: r[key]) if ok else None
