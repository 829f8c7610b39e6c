"""
Two-Mode Sweep
Simultaneous retrodiction of two oscillators over separation and cooperativity
"""

from typing import Any, Dict, List, Optional

import numpy as np

from app.models.sweeps import SweepResult, SweepSpec, SweepTask
from app.models.system import SystemConfig
from app.modules.filters.banks import estimate_many, exp_filters, gls_filters
from app.modules.physics.model import config_hash, ensure_validated
from app.modules.simulators.simulator import run_ensemble
from app.modules.states.gaussian import thermal_state
from app.modules.statistics.inference import sample_covariance
from app.modules.statistics.noise_covariance import cross_error, noise_covariance_set
from app.modules.sweeps.runner import apply_point, argmin_row, check_axes, run_points
from app.core.exceptions import RetrodictionError, SweepSpecError
from app.core.logging import get_logger

logger = get_logger(__name__)

ALLOWED_AXES = ("delta_ratio", "cooperativity", "epsilon", "nu")

ANALYTIC_COLUMNS = (
    "dn1_gls", "dn2_gls", "dn_gls",
    "cross_error_abs", "cross_error_re", "cross_error_im", "cond_J",
    "dn1_exp", "dn2_exp", "exp_status",
)
MC_COLUMNS = ("mc_dn1_gls", "mc_dn2_gls", "mc_se1", "mc_se2")
SUMMARY_COLUMNS = (
    "C_opt", "C_opt_estimate", "dn_at_C_opt", "dn1_at_C_opt", "dn2_at_C_opt", "cross_error_at_C_opt",
)


def _check_base(base: SystemConfig):
    if base.n_modes != 2:
        raise SweepSpecError(f"two-mode sweep needs two oscillators (got {base.n_modes})")
    first, second = base.oscillators
    if first.gamma != second.gamma:
        logger.warning("⚠️  two-mode sweep assumes identical damping rates")
    if first.nu != 0 or second.nu != 0:
        logger.warning("⚠️  two-mode sweep assumes zero bath occupation")
    if base.cavity.epsilon != 1.0:
        logger.warning("⚠️  two-mode sweep assumes unit detection efficiency")


def two_mode_point(config: SystemConfig) -> Dict[str, Any]:
    """GLS and per-oscillator optimal exponential added noise of one configuration"""
    gls = gls_filters(config)
    noise = noise_covariance_set(config, gls)
    cross = cross_error(noise)
    row: Dict[str, Any] = {
        "dn1_gls": noise.delta_n[0],
        "dn2_gls": noise.delta_n[1],
        "dn_gls": float(np.mean(noise.delta_n)),
        "cross_error_abs": abs(cross),
        "cross_error_re": cross.real,
        "cross_error_im": cross.imag,
        "cond_J": gls.cond,
    }
    try:
        exp = exp_filters(config, "auto")
        exp_noise = noise_covariance_set(config, exp)
        row["dn1_exp"] = exp_noise.delta_n[0]
        row["dn2_exp"] = exp_noise.delta_n[1]
        row["exp_status"] = "ok"
    except RetrodictionError as e:
        row["dn1_exp"] = row["dn2_exp"] = np.nan
        row["exp_status"] = f"error:{type(e).__name__}"
    return row


def mc_two_mode_point(config: SystemConfig, n_shots: int, master_seed: int) -> Dict[str, float]:
    """Monte Carlo GLS added occupation of each oscillator with its standard error"""
    state = thermal_state([osc.nu for osc in config.oscillators])
    ensemble = run_ensemble(config, state, n_shots, master_seed)
    estimate = sample_covariance(estimate_many(gls_filters(config), ensemble.records))
    row = {}
    for i in range(2):
        block = slice(2 * i, 2 * i + 2)
        row[f"mc_dn{i + 1}_gls"] = 0.5 * float(np.trace(estimate.sigma[block, block]) - np.trace(state.cov[block, block]))
        row[f"mc_se{i + 1}"] = 0.5 * float(np.hypot(estimate.se[2 * i, 2 * i], estimate.se[2 * i + 1, 2 * i + 1]))
    return row


def sweep_two_mode(
    base: SystemConfig,
    spec: SweepSpec,
    workers: Optional[int] = None
) -> SweepResult:
    """
    Δn of GLS and exponential banks over δ/Γ × C, with C_opt(δ) extraction

    Both oscillators share the swept cooperativity. The summary holds, per
    separation, the grid cooperativity minimizing the first oscillator's GLS
    added noise, the added noise and cross error there, and the estimate
    δ/(2Γ) for comparison.
    Monte Carlo tasks add GLS ensembles of spec.n_shots shots per point; the
    mc task skips the closed-form columns and the summary.

    Args:
        base: Two-oscillator configuration (identical Γ, ν = 0, ε = 1)
        spec: Axes over delta_ratio and cooperativity
        workers: Worker threads

    Returns:
        SweepResult
    """
    base = ensure_validated(base)
    _check_base(base)
    check_axes(spec, ALLOWED_AXES)
    for required in ("delta_ratio", "cooperativity"):
        if spec.axis(required) is None:
            raise SweepSpecError(f"two-mode sweep needs a {required} axis")

    with_mc = spec.task in (SweepTask.MC, SweepTask.BOTH)

    def point_row(point: Dict[str, float]) -> Dict[str, Any]:
        config = apply_point(base, point)
        row = two_mode_point(config) if spec.task != SweepTask.MC else {}
        if with_mc:
            row.update(mc_two_mode_point(config, spec.n_shots, spec.master_seed))
        return row

    columns = (ANALYTIC_COLUMNS if spec.task != SweepTask.MC else ()) + (MC_COLUMNS if with_mc else ())
    rows = run_points(point_row, spec.points(), workers, columns=columns)

    return SweepResult(
        name="sweep-two-mode",
        rows=rows,
        summary=optimal_cooperativity(rows, spec) if spec.task != SweepTask.MC else [],
        metadata={"config_hash": config_hash(base), "task": spec.task.value, "master_seed": spec.master_seed},
    )


def optimal_cooperativity(rows: List[Dict[str, Any]], spec: SweepSpec) -> List[Dict[str, Any]]:
    """Per fixed non-C axis values, the row minimizing the first oscillator's GLS added noise"""
    fixed = [a.name for a in spec.axes if a.name != "cooperativity"]
    groups: Dict[tuple, List[Dict[str, Any]]] = {}
    for r in rows:
        groups.setdefault(tuple(r[name] for name in fixed), []).append(r)

    summary = []
    for key, group in groups.items():
        entry: Dict[str, Any] = dict(zip(fixed, key))
        entry.update(dict.fromkeys(SUMMARY_COLUMNS, np.nan))
        entry["C_opt_estimate"] = entry["delta_ratio"] / 2.0
        best = argmin_row(group, "dn1_gls")
        if best is None:
            entry["status"] = "error:no successful points"
        else:
            entry.update({
                "C_opt": best["cooperativity"],
                "dn_at_C_opt": best["dn_gls"],
                "dn1_at_C_opt": best["dn1_gls"],
                "dn2_at_C_opt": best["dn2_gls"],
                "cross_error_at_C_opt": best["cross_error_abs"],
                "status": "ok",
            })
        summary.append(entry)
    return summary
