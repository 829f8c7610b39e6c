"""
Command-Line Entry Point
Simulation, retrodiction, spectra and sweeps as table-producing subcommands

Usage: python -m app.main <subcommand> --help
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import GridMismatchError, handle_cli_exception
from app.core.logging import get_logger, log_section, setup_logging
from app.models.records import HomodyneRecord
from app.models.state import GaussianState
from app.models.sweeps import SweepAxis, SweepSpec, SweepTask
from app.models.system import SystemConfig
from app.modules.filters.banks import filter_spectrum
from app.modules.physics.config_loader import config_to_dict, hz, load_config
from app.modules.physics.model import config_hash, ensure_validated
from app.modules.physics.presets import list_presets, load_preset
from app.modules.simulators.simulator import run_ensemble
from app.modules.simulators.spectral import analytic_psd, estimate_config_psd
from app.modules.states.gaussian import log_negativity, mode_occupation, squeezing_db, thermal_state
from app.modules.states.state_spec import parse_state_spec
from app.modules.statistics.noise_covariance import cross_error
from app.modules.sweeps.sql import sweep_single_sql
from app.modules.sweeps.two_mode import sweep_two_mode
from app.services.record_store import load_records, save_records
from app.services.report_writer import ReportWriter, quadrature_labels
from app.services.retrodiction import RetrodictionPipeline

logger = get_logger(__name__)

# Exit code of sweeps with failed points
PARTIAL_SWEEP_CODE = 1


# ============================================================================
# SHARED HELPERS
# ============================================================================

def _load_system(args: argparse.Namespace, default_preset: Optional[str] = None) -> SystemConfig:
    overrides = {k: getattr(args, k) for k in ("fs", "tf") if getattr(args, k, None) is not None}
    if args.config:
        config = load_config(args.config)
        if overrides:
            config = config.evolve(grid=config.grid.model_copy(update=overrides))
        return ensure_validated(config)
    name = args.preset or default_preset
    if name is None:
        raise SystemExit("error: one of --config or --preset is required")
    logger.info(f"✓ Using preset '{name}'")
    return ensure_validated(load_preset(name, **overrides))


def _state_for(args: argparse.Namespace, config: SystemConfig) -> GaussianState:
    if args.state:
        return parse_state_spec(args.state, config.n_modes)
    return thermal_state([osc.nu for osc in config.oscillators])


def _load_matching_records(path: str, config: SystemConfig) -> List[HomodyneRecord]:
    records, grid = load_records(path)
    if not math.isclose(grid.fs, config.grid.fs, rel_tol=1e-12):
        raise GridMismatchError(f"records sampled at {grid.fs} Hz, config grid at {config.grid.fs} Hz")
    if grid.nt != config.grid.nt:
        raise GridMismatchError(f"records have {grid.nt} samples, config grid has {config.grid.nt}")
    return records


def _provenance(args: argparse.Namespace, config: SystemConfig) -> dict:
    return {
        "command": args.command,
        "config_hash": config_hash(config),
        "config": config_to_dict(config),
        "seed": getattr(args, "seed", None),
    }


def _add_system_args(parser: argparse.ArgumentParser):
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", help="Configuration JSON (rates in Hz)")
    source.add_argument("--preset", choices=list_presets(), help="Named configuration")
    parser.add_argument("--fs", type=float, help="Override sample rate (Hz)")
    parser.add_argument("--tf", type=float, help="Override record duration (s)")
    parser.add_argument("--output", default=settings.OUTPUT_DIR, help="Output directory")


def _add_ensemble_args(parser: argparse.ArgumentParser):
    parser.add_argument("--state", help="vacuum | thermal:nu=1 | squeezed:db=-10 | tmss:z=1.15i")
    parser.add_argument("--shots", type=int, default=1000, help="Number of shots")
    parser.add_argument("--seed", type=int, default=0, help="Master seed")
    parser.add_argument("--workers", type=int, default=1, help="Simulation threads")


def _per_decade(args: argparse.Namespace) -> int:
    return args.per_decade or settings.GRID_POINTS_PER_DECADE


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def cmd_validate_config(args: argparse.Namespace) -> int:
    """Print derived quantities and the frequency-resolution report"""
    config = _load_system(args)
    d = config.derived
    report = {
        "config_hash": config_hash(config),
        "nt": config.grid.nt,
        "shot_noise_psd": d.shot_noise_psd,
        "oscillators": [
            {
                "label": osc.label or f"osc{i}",
                "g_eff_hz": d.g_eff[i] / (2 * math.pi),
                "phi_rad": d.phi[i],
                "cooperativity": d.cooperativity[i],
                "backaction_rate": d.backaction_rate[i],
                "thermal_rate": d.thermal_rate[i],
                "high_q": d.high_q[i],
            }
            for i, osc in enumerate(config.oscillators)
        ],
        "resolution": [entry.model_dump() for entry in d.resolution],
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate an ensemble and write its records"""
    config = _load_system(args)
    state = _state_for(args, config)
    ensemble = run_ensemble(config, state, args.shots, args.seed, workers=args.workers)

    writer = ReportWriter(args.output, _provenance(args, config))
    path = save_records(Path(args.output) / args.records, ensemble.records, config.grid)
    frame = pd.DataFrame(ensemble.initial_points, columns=quadrature_labels(config.n_modes))
    frame.insert(0, "shot", np.arange(ensemble.n_shots))
    writer.write_table("initial_points", frame)
    writer.write_json("simulate", {"records": path.name, "shots": ensemble.n_shots, "state": state.to_json_dict()})
    return 0


def _gamma_option(values: Optional[List[str]]):
    if not values or values == ["auto"]:
        return "auto"
    return [hz(float(v)) for v in values]


def cmd_retrodict(args: argparse.Namespace) -> int:
    """Estimate every shot, remove the estimator biases, report the initial state"""
    config = _load_system(args)
    options = {}
    if args.family == "exp":
        options["gammas"] = _gamma_option(args.gamma)
    if args.family == "gls" and args.decimation:
        options["decimation"] = args.decimation

    pipeline = RetrodictionPipeline(config, args.family, options, exact=not args.rwa, workers=args.workers)
    if args.records:
        records = _load_matching_records(args.records, config)
        truth = parse_state_spec(args.state, config.n_modes) if args.state else None
        report = pipeline.run(records, truth=truth)
    else:
        report = pipeline.run_simulated(_state_for(args, config), args.shots, args.seed)

    writer = ReportWriter(args.output, _provenance(args, config))
    labels = quadrature_labels(config.n_modes)
    estimates = pd.DataFrame(report.estimates, columns=labels)
    estimates.insert(0, "shot", np.arange(len(estimates)))
    writer.write_table("estimates", estimates)
    writer.write_matrix("sample_cov", report.covariance.sigma)
    writer.write_matrix("noise_M", report.noise.M)
    writer.write_matrix("noise_T", report.noise.T)
    writer.write_matrix("noise_B", report.noise.B)
    writer.write_matrix("inferred_cov", report.inferred.cov)
    writer.write_matrix("inferred_se", report.inferred.se)
    writer.write_table("mean_square", report.mean_square)

    if args.spectra:
        bank = pipeline.bank
        columns = {}
        for row, label in enumerate(labels):
            freqs, amplitude = filter_spectrum(bank, row)
            columns["frequency_hz"] = freqs
            columns[label] = amplitude
        writer.write_table("filter_spectra", pd.DataFrame(columns))

    inferred = GaussianState(mean=report.inferred.mean, cov=report.inferred.cov)
    diagnostics = {
        "occupation": [mode_occupation(inferred, i) for i in range(config.n_modes)],
        "squeezing_db": [squeezing_db(inferred.block(i, i)) for i in range(config.n_modes)],
    }
    if config.n_modes == 2:
        diagnostics["log_negativity"] = log_negativity(inferred.cov)
        diagnostics["cross_error"] = cross_error(report.noise)

    summary = {
        "family": report.family,
        "n_s": report.covariance.n_s,
        "delta_n": report.noise.delta_n,
        "physical": report.physical,
        "violations": report.inferred.violations,
        "diagnostics": diagnostics,
        "covariance": report.covariance.to_json_dict(),
        "noise": report.noise.to_json_dict(),
        "inferred": report.inferred.to_json_dict(),
        "broadened": report.broadened.to_json_dict() if report.broadened else None,
        "mean_square_max_abs_z": float(np.max(np.abs(report.mean_square["z"]))),
    }
    closure = report.closure_z()
    if closure is not None:
        summary["closure_max_abs_z"] = float(np.max(np.abs(closure)))
    writer.write_json("retrodiction", summary)

    log_section(logger, f"{'✅' if report.physical else '⚠️ '} physicality: {'pass' if report.physical else 'fail'}")
    return 0


def cmd_psd(args: argparse.Namespace) -> int:
    """Normalized PSD of stored (or freshly simulated) records"""
    config = _load_system(args)
    if args.records:
        records = _load_matching_records(args.records, config)
    else:
        records = run_ensemble(config, _state_for(args, config), args.shots, args.seed, workers=args.workers).records

    result = estimate_config_psd(config, records, args.segments or settings.PSD_SEGMENTS)
    frame = pd.DataFrame({
        "frequency_hz": result.frequencies,
        "psd": result.psd,
        "model": analytic_psd(config, result.frequencies),
    })
    writer = ReportWriter(args.output, _provenance(args, config))
    writer.write_table("psd", frame)
    return 0


def _write_sweep(args: argparse.Namespace, config: SystemConfig, result, name: str) -> int:
    writer = ReportWriter(args.output, {**_provenance(args, config), **result.metadata})
    writer.write_table(name, result.to_frame())
    writer.write_table(f"{name}_summary", result.summary_frame())
    return 0 if result.all_ok else PARTIAL_SWEEP_CODE


def cmd_sweep_sql(args: argparse.Namespace) -> int:
    """Added-noise surface over cooperativity × γ/Γ for one oscillator"""
    config = _load_system(args, default_preset="single-sql")
    n = _per_decade(args)
    axes = [SweepAxis.log_grid("cooperativity", args.c_min, args.c_max, n)]
    if not args.optimum_only:
        axes.append(SweepAxis.log_grid("gamma_ratio", args.gamma_min, args.gamma_max, n))
    spec = SweepSpec(axes=axes, task=SweepTask(args.task), master_seed=args.seed, n_shots=args.shots)
    result = sweep_single_sql(config, spec, workers=args.workers)
    return _write_sweep(args, config, result, "sweep_sql")


def cmd_sweep_two_mode(args: argparse.Namespace) -> int:
    """GLS added noise and cross error over δ/Γ × cooperativity"""
    config = _load_system(args, default_preset="two-mode-resolution")
    n = _per_decade(args)
    spec = SweepSpec(axes=[
        SweepAxis.log_grid("delta_ratio", args.delta_min, args.delta_max, n),
        SweepAxis.log_grid("cooperativity", args.c_min, args.c_max, n),
    ], task=SweepTask(args.task), master_seed=args.seed, n_shots=args.shots)
    result = sweep_two_mode(config, spec, workers=args.workers)
    return _write_sweep(args, config, result, "sweep_two_mode")


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optoretro",
        description=settings.APP_DESCRIPTION,
    )
    parser.add_argument("--log-level", help="Override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-config", help="Print derived quantities of a configuration")
    _add_system_args(p)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("simulate", help="Simulate an ensemble of records")
    _add_system_args(p)
    _add_ensemble_args(p)
    p.add_argument("--records", default="records.npz", help="Record file name (.npz or .csv) inside --output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("retrodict", help="Retrodict initial states from records")
    _add_system_args(p)
    _add_ensemble_args(p)
    source = p.add_mutually_exclusive_group()
    source.add_argument("--records", help="Record file (.npz or .csv)")
    source.add_argument("--simulate", action="store_true", help="Simulate the ensemble (default)")
    p.add_argument("--family", choices=["ols", "exp", "gls", "avg"], default="gls")
    p.add_argument("--gamma", nargs="+", help="EXP decay rates in Hz, one per oscillator, or 'auto'")
    p.add_argument("--decimation", type=int, help="GLS design-grid decimation")
    p.add_argument("--rwa", action="store_true", help="Rotating-wave backaction covariance")
    p.add_argument("--spectra", action="store_true", help="Also write normalized filter spectra")
    p.set_defaults(func=cmd_retrodict)

    p = sub.add_parser("psd", help="Shot-noise-normalized power spectral density")
    _add_system_args(p)
    _add_ensemble_args(p)
    p.add_argument("--records", help="Record file; simulates when omitted")
    p.add_argument("--segments", type=int, help="Welch segments per record")
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("sweep-sql", help="Single-oscillator added noise versus C and γ")
    _add_system_args(p)
    p.add_argument("--c-min", type=float, default=0.1)
    p.add_argument("--c-max", type=float, default=100.0)
    p.add_argument("--gamma-min", type=float, default=1.0, help="Smallest γ/Γ")
    p.add_argument("--gamma-max", type=float, default=1000.0, help="Largest γ/Γ")
    p.add_argument("--optimum-only", action="store_true", help="Evaluate only at the optimal γ")
    p.add_argument("--per-decade", type=int, help="Log-grid density")
    p.add_argument("--task", choices=[t.value for t in SweepTask], default="analytic")
    p.add_argument("--shots", type=int, default=1000, help="Shots per Monte Carlo check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, help="Worker threads")
    p.set_defaults(func=cmd_sweep_sql)

    p = sub.add_parser("sweep-two-mode", help="Two-oscillator added noise versus δ and C")
    _add_system_args(p)
    p.add_argument("--delta-min", type=float, default=1.0, help="Smallest δ/Γ")
    p.add_argument("--delta-max", type=float, default=50.0, help="Largest δ/Γ")
    p.add_argument("--c-min", type=float, default=0.3)
    p.add_argument("--c-max", type=float, default=100.0)
    p.add_argument("--per-decade", type=int, help="Log-grid density")
    p.add_argument("--task", choices=[t.value for t in SweepTask], default="analytic")
    p.add_argument("--shots", type=int, default=1000, help="Shots per Monte Carlo check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, help="Worker threads")
    p.set_defaults(func=cmd_sweep_two_mode)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand, map errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(args.log_level, labels={"command": args.command})
    log_section(logger, f"🚀 {settings.APP_NAME} {args.command}")
    try:
        return args.func(args)
    except Exception as e:
        return handle_cli_exception(e)


if __name__ == "__main__":
    sys.exit(main())
