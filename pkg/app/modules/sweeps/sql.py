"""
Single-Oscillator SQL Sweep
Added noise of exponential filters over cooperativity and decay rate
"""

from typing import Any, Dict, List, Optional

import numpy as np

from app.models.sweeps import SweepResult, SweepSpec, SweepTask
from app.models.system import SystemConfig
from app.modules.filters.banks import estimate_many, exp_filters
from app.modules.filters.optimal import analytic_exp_added_noise, optimal_gamma, sql_floor
from app.modules.physics.model import config_hash, ensure_validated
from app.modules.simulators.simulator import run_ensemble
from app.modules.states.gaussian import thermal_state
from app.modules.statistics.inference import sample_covariance
from app.modules.statistics.noise_covariance import noise_covariance_set
from app.modules.sweeps.runner import apply_point, argmin_row, check_axes, run_points
from app.core.exceptions import SweepSpecError
from app.core.logging import get_logger

logger = get_logger(__name__)

ALLOWED_AXES = ("cooperativity", "gamma_ratio", "nu", "epsilon")

SURFACE_COLUMNS = ("dn_thermal", "dn_backaction", "dn_shot", "dn_total", "cond_J", "dn_total_closed_form")
OPTIMUM_COLUMNS = (
    "gamma_opt_ratio_formula", "dn_at_formula", "dn_closed_form_at_formula", "sql_floor",
    "gamma_opt_ratio_grid", "dn_min_grid",
)
MC_COLUMNS = ("mc_dn_total", "mc_se")


def exp_added_noise(config: SystemConfig, gamma: float) -> Dict[str, float]:
    """Numeric added occupations of a single-oscillator exponential bank"""
    bank = exp_filters(config, [gamma])
    noise = noise_covariance_set(config, bank)
    return {
        "dn_thermal": 0.5 * float(np.trace(noise.T)),
        "dn_backaction": 0.5 * float(np.trace(noise.B)),
        "dn_shot": 0.5 * float(np.trace(noise.M)),
        "dn_total": noise.delta_n[0],
        "cond_J": bank.cond,
    }


def mc_added_noise(config: SystemConfig, gamma: float, n_shots: int, master_seed: int) -> Dict[str, float]:
    """Monte Carlo added occupation of a thermal ensemble and its standard error"""
    osc = config.oscillators[0]
    state = thermal_state([osc.nu])
    ensemble = run_ensemble(config, state, n_shots, master_seed)
    bank = exp_filters(config, [gamma])
    estimate = sample_covariance(estimate_many(bank, ensemble.records))
    dn = 0.5 * float(np.trace(estimate.sigma) - np.trace(state.cov))
    se = 0.5 * float(np.hypot(estimate.se[0, 0], estimate.se[1, 1]))
    return {"mc_dn_total": dn, "mc_se": se}


def sweep_single_sql(
    base: SystemConfig,
    spec: SweepSpec,
    workers: Optional[int] = None
) -> SweepResult:
    """
    Δn₁ over a cooperativity × (γ/Γ) grid plus the γ-optimized curve

    The surface comes from the closed-form kernels of the noise statistics,
    each point also carrying the high-Q closed form. The summary has one row per
    cooperativity: the grid minimum over γ, the value at the optimal decay rate
    formula, optional Monte Carlo checks there, and the floor 1/(2√ε).

    Args:
        base: Single-oscillator configuration
        spec: Axes over cooperativity (required), gamma_ratio, nu, epsilon
        workers: Worker threads (settings.SWEEP_WORKERS by default)

    Returns:
        SweepResult
    """
    base = ensure_validated(base)
    if base.n_modes != 1:
        raise SweepSpecError(f"SQL sweep needs a single-oscillator config (got {base.n_modes})")
    if base.oscillators[0].gamma <= 0:
        raise SweepSpecError("SQL sweep needs a damped oscillator")
    check_axes(spec, ALLOWED_AXES)
    if spec.axis("cooperativity") is None:
        raise SweepSpecError("SQL sweep needs a cooperativity axis")

    def surface_point(point: Dict[str, float]) -> Dict[str, Any]:
        config = apply_point(base, {k: v for k, v in point.items() if k != "gamma_ratio"})
        osc = config.oscillators[0]
        ratio = point.get("gamma_ratio")
        if ratio is None:
            ratio = optimal_gamma(osc, point["cooperativity"], osc.nu, config.cavity.epsilon) / osc.gamma
            point_row = {"gamma_ratio": ratio}
        else:
            point_row = {}
        row = exp_added_noise(config, ratio * osc.gamma)
        row.update(point_row)
        closed = analytic_exp_added_noise(point["cooperativity"], osc.nu, config.cavity.epsilon, ratio)
        row["dn_total_closed_form"] = closed["total"]
        return row

    columns = SURFACE_COLUMNS if spec.axis("gamma_ratio") else SURFACE_COLUMNS + ("gamma_ratio",)
    rows = run_points(surface_point, spec.points(), workers, columns=columns)
    summary = _optimum_curve(base, spec, rows, workers)

    return SweepResult(
        name="sweep-sql",
        rows=rows,
        summary=summary,
        metadata={
            "config_hash": config_hash(base),
            "task": spec.task.value,
            "master_seed": spec.master_seed,
            "sql_floor": sql_floor(base.cavity.epsilon),
        },
    )


def _optimum_curve(
    base: SystemConfig,
    spec: SweepSpec,
    rows: List[Dict[str, Any]],
    workers: Optional[int]
) -> List[Dict[str, Any]]:
    fixed = [a.name for a in spec.axes if a.name != "gamma_ratio"]
    groups: Dict[tuple, List[Dict[str, Any]]] = {}
    for r in rows:
        groups.setdefault(tuple(r[name] for name in fixed), []).append(r)

    def optimum_point(point: Dict[str, float]) -> Dict[str, Any]:
        config = apply_point(base, point)
        osc = config.oscillators[0]
        eps = config.cavity.epsilon
        gamma_opt = optimal_gamma(osc, point["cooperativity"], osc.nu, eps)
        at_opt = exp_added_noise(config, gamma_opt)
        out = {
            "gamma_opt_ratio_formula": gamma_opt / osc.gamma,
            "dn_at_formula": at_opt["dn_total"],
            "dn_closed_form_at_formula": analytic_exp_added_noise(
                point["cooperativity"], osc.nu, eps, gamma_opt / osc.gamma
            )["total"],
            "sql_floor": sql_floor(eps),
        }
        best = argmin_row(groups[tuple(point[name] for name in fixed)], "dn_total")
        if best is not None:
            out["gamma_opt_ratio_grid"] = best["gamma_ratio"]
            out["dn_min_grid"] = best["dn_total"]
        if spec.task in (SweepTask.MC, SweepTask.BOTH):
            out.update(mc_added_noise(config, gamma_opt, spec.n_shots, spec.master_seed))
        return out

    points = [dict(zip(fixed, key)) for key in groups]
    with_mc = spec.task in (SweepTask.MC, SweepTask.BOTH)
    return run_points(optimum_point, points, workers, columns=OPTIMUM_COLUMNS + (MC_COLUMNS if with_mc else ()))
