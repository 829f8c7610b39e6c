"""
Test Sweeps and CLI
Sweep grids, the SQL and two-mode sweeps, and the command-line entry point
"""

import io
import json
import math
import sys
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Add project root to Python path
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, project_root)
from app.main import main
from app.models.sweeps import SweepAxis, SweepSpec, SweepTask
from app.modules.physics.config_loader import config_from_dict
from app.modules.physics.presets import load_preset
from app.modules.sweeps.runner import apply_point, argmin_row, check_axes, run_points
from app.modules.sweeps.sql import sweep_single_sql
from app.modules.sweeps.two_mode import sweep_two_mode
from app.core.exceptions import (
    ConfigValidationError,
    GridMismatchError,
    IllConditionedError,
    MemoryBudgetError,
    RecordIOError,
    SweepSpecError,
    exit_code_for,
    handle_cli_exception,
)
from app.core.logging import setup_logging, get_logger

setup_logging()
logger = get_logger(__name__)


def sql_base(nu=1.0):
    return config_from_dict({
        "cavity": {"kappa": 5e6, "nbar": 1e4, "epsilon": 1.0},
        "oscillators": [{"omega": 125e3, "gamma": 2e3, "nu": nu, "cooperativity": 1.0}],
        "grid": {"fs": 3e6, "tf": 1e-3},
    })


def test_sweep_grids():
    """Log-grid density, point ordering and axis validation"""
    print("\n" + "=" * 60)
    print("TEST: Sweep grids")
    print("=" * 60)

    axis = SweepAxis.log_grid("cooperativity", 1.0, 100.0, 40)
    assert len(axis) == 81
    assert axis.values[0] == pytest.approx(1.0)
    assert axis.values[-1] == pytest.approx(100.0)
    assert np.allclose(np.diff(np.log10(axis.values)), 1 / 40)

    spec = SweepSpec(axes=[
        SweepAxis(name="delta_ratio", values=[1.0, 2.0]),
        SweepAxis(name="cooperativity", values=[3.0, 4.0, 5.0]),
    ])
    points = spec.points()
    assert len(points) == 6
    assert points[0] == {"delta_ratio": 1.0, "cooperativity": 3.0}
    assert points[1] == {"delta_ratio": 1.0, "cooperativity": 4.0}
    assert points[3] == {"delta_ratio": 2.0, "cooperativity": 3.0}

    with pytest.raises(ValueError):
        SweepSpec(axes=[axis, axis])
    with pytest.raises(SweepSpecError):
        check_axes(spec, ("cooperativity",))
    print(f"✓ {len(axis)} points over two decades, last axis fastest")


def test_apply_point():
    """Cooperativity and separation are realized on the configuration"""
    print("\n" + "=" * 60)
    print("TEST: Apply sweep point")
    print("=" * 60)

    config = apply_point(sql_base(), {"cooperativity": 7.0, "epsilon": 0.5})
    assert config.derived.cooperativity[0] == pytest.approx(7.0, rel=1e-9)
    assert config.cavity.epsilon == 0.5

    two = load_preset("two-mode-resolution", tf=5e-4)
    ref = two.oscillators[0]
    moved = apply_point(two, {"delta_ratio": 30.0})
    assert moved.oscillators[1].omega == pytest.approx(ref.omega + 30.0 * ref.gamma)

    with pytest.raises(SweepSpecError):
        apply_point(sql_base(), {"delta_ratio": 2.0})
    print("✓ C = 7 realized, ω₂ = ω₁ + δΓ")


def test_run_points_tags_failures():
    """Failed points keep their place and carry the error type"""
    print("\n" + "=" * 60)
    print("TEST: Sweep point failures")
    print("=" * 60)

    def fn(point):
        if point["x"] == 2.0:
            raise IllConditionedError(1e9, 1e8)
        return {"y": point["x"] ** 2}

    points = [{"x": float(x)} for x in range(5)]
    rows = run_points(fn, points, workers=3, columns=("y",))
    assert [r["index"] for r in rows] == list(range(5))
    assert rows[2]["status"] == "error:IllConditionedError"
    assert np.isnan(rows[2]["y"])
    assert "ill-conditioned" in rows[2]["error"]
    assert rows[3]["error"] == ""
    assert all(set(r) == set(rows[0]) for r in rows)
    assert rows[3]["y"] == 9.0
    assert argmin_row(rows, "y")["x"] == 0.0
    assert sum(r["status"] == "ok" for r in rows) == 4
    print("✓ Row order preserved, failure tagged")


def test_sql_sweep_surface():
    """Formula optimum against the γ grid at C = 3, ν = 1"""
    print("\n" + "=" * 60)
    print("TEST: SQL sweep surface")
    print("=" * 60)

    spec = SweepSpec(axes=[
        SweepAxis(name="cooperativity", values=[3.0]),
        SweepAxis.log_grid("gamma_ratio", 1.0, 100.0, 20),
    ])
    result = sweep_single_sql(sql_base(nu=1.0), spec, workers=2)
    assert result.all_ok
    assert len(result.rows) == 41
    assert result.metadata["sql_floor"] == pytest.approx(0.5)

    (summary,) = result.summary
    assert summary["gamma_opt_ratio_formula"] == pytest.approx(math.sqrt(73))
    assert summary["dn_closed_form_at_formula"] == pytest.approx((math.sqrt(73) + 1) / 12)
    assert summary["dn_at_formula"] <= summary["dn_min_grid"] * 1.02
    print(f"✓ Δn at formula {summary['dn_at_formula']:.4f}, grid minimum {summary['dn_min_grid']:.4f}")

    frame = result.to_frame()
    assert {"dn_thermal", "dn_backaction", "dn_shot", "dn_total", "dn_total_closed_form"} <= set(frame.columns)
    parts = frame["dn_thermal"] + frame["dn_backaction"] + frame["dn_shot"]
    assert np.allclose(parts, frame["dn_total"], rtol=1e-9)


def test_sql_optimum_curve():
    """Optimized added noise falls with C toward the floor"""
    print("\n" + "=" * 60)
    print("TEST: SQL optimum curve")
    print("=" * 60)

    spec = SweepSpec(axes=[SweepAxis(name="cooperativity", values=[0.3, 1.0, 3.0])])
    result = sweep_single_sql(sql_base(nu=0.0), spec, workers=1)
    assert result.all_ok

    for row in result.rows:
        C = row["cooperativity"]
        assert row["gamma_ratio"] == pytest.approx(1 + 2 * C)
        assert row["dn_total_closed_form"] == pytest.approx((1 + C) / (2 * C))
        if C <= 1.0:
            assert row["dn_total"] == pytest.approx((1 + C) / (2 * C), rel=0.05)
        print(f"✓ C = {C:g}: Δn = {row['dn_total']:.4f} (closed form {(1 + C) / (2 * C):.4f})")

    curve = [s["dn_at_formula"] for s in result.summary]
    assert curve[0] > curve[1] > curve[2] > 0.5


def test_sql_sweep_rejects_bad_requests():
    """Two oscillators or a missing cooperativity axis"""
    print("\n" + "=" * 60)
    print("TEST: SQL sweep validation")
    print("=" * 60)

    spec = SweepSpec(axes=[SweepAxis(name="cooperativity", values=[1.0])])
    with pytest.raises(SweepSpecError):
        sweep_single_sql(load_preset("two-mode-resolution", tf=5e-4), spec)
    with pytest.raises(SweepSpecError):
        sweep_single_sql(sql_base(), SweepSpec(axes=[SweepAxis(name="nu", values=[0.0])]))
    print("✓ Rejected")


def test_two_mode_cooperativity_optimum():
    """Resolved pair: interior optimum near δ/2 and added noise near the floor"""
    print("\n" + "=" * 60)
    print("TEST: Two-mode optimal cooperativity")
    print("=" * 60)

    base = load_preset("two-mode-resolution", tf=5e-4)
    spec = SweepSpec(axes=[
        SweepAxis(name="delta_ratio", values=[50.0]),
        SweepAxis.log_grid("cooperativity", 5.0, 125.0, 10),
    ])
    result = sweep_two_mode(base, spec, workers=2)
    assert result.all_ok

    (summary,) = result.summary
    print(f"✓ C_opt = {summary['C_opt']:.3g}, Δn₁ = {summary['dn1_at_C_opt']:.4f}")
    assert summary["status"] == "ok"
    assert summary["C_opt_estimate"] == 25.0
    assert 25.0 / 1.5 <= summary["C_opt"] <= 25.0 * 1.5
    assert summary["dn1_at_C_opt"] == pytest.approx(0.5, rel=0.2)
    assert summary["cross_error_at_C_opt"] < 0.1


def test_two_mode_cross_error_grows_when_unresolved():
    """Close frequencies correlate the two estimation errors"""
    print("\n" + "=" * 60)
    print("TEST: Two-mode cross error")
    print("=" * 60)

    base = load_preset("two-mode-resolution", tf=5e-4)
    spec = SweepSpec(axes=[
        SweepAxis(name="delta_ratio", values=[1.0, 50.0]),
        SweepAxis(name="cooperativity", values=[5.0]),
    ])
    close, far = sweep_two_mode(base, spec, workers=2).rows
    assert close["status"] == "ok" and far["status"] == "ok"
    print(f"✓ |cross error| δ=1: {close['cross_error_abs']:.3f}, δ=50: {far['cross_error_abs']:.3f}")
    assert close["cross_error_abs"] > far["cross_error_abs"]
    assert close["dn_gls"] > far["dn_gls"]


def test_two_mode_monte_carlo_task():
    """Ensemble added noise agrees with the closed form at one resolved point"""
    print("\n" + "=" * 60)
    print("TEST: Two-mode Monte Carlo task")
    print("=" * 60)

    base = load_preset("two-mode-resolution", tf=5e-4)
    spec = SweepSpec(
        axes=[
            SweepAxis(name="delta_ratio", values=[50.0]),
            SweepAxis(name="cooperativity", values=[10.0]),
        ],
        task=SweepTask.BOTH,
        n_shots=400,
        master_seed=11,
    )
    result = sweep_two_mode(base, spec, workers=1)
    (row,) = result.rows
    assert row["status"] == "ok"
    assert result.metadata["master_seed"] == 11
    for i in (1, 2):
        mc, se, exact = row[f"mc_dn{i}_gls"], row[f"mc_se{i}"], row[f"dn{i}_gls"]
        print(f"✓ oscillator {i}: MC {mc:.3f} ± {se:.3f}, closed form {exact:.3f}")
        assert abs(mc - exact) < 4 * se

    only_mc = sweep_two_mode(base, spec.model_copy(update={"task": SweepTask.MC}), workers=1)
    assert only_mc.summary == []
    assert "dn1_gls" not in only_mc.rows[0]
    assert only_mc.rows[0]["mc_dn1_gls"] == row["mc_dn1_gls"]


def test_exit_codes():
    """Error families map to process exit codes"""
    print("\n" + "=" * 60)
    print("TEST: Exit codes")
    print("=" * 60)

    assert exit_code_for(ConfigValidationError("grid.fs", "fs > 0", -1)) == 2
    assert exit_code_for(RecordIOError("x")) == 3
    assert exit_code_for(GridMismatchError("x")) == 4
    assert exit_code_for(IllConditionedError(1e9, 1e8)) == 5
    assert exit_code_for(MemoryBudgetError(2**30, 2**28, 4)) == 6
    assert exit_code_for(KeyError("x")) == 70

    stream = io.StringIO()
    code = handle_cli_exception(MemoryBudgetError(2**30, 2**28, 4), stream)
    payload = json.loads(stream.getvalue())
    assert code == 6
    assert payload["error"] == "MemoryBudgetError"
    assert payload["exit_code"] == 6
    assert payload["details"]["suggested_decimation"] == 4
    print("✓ 2, 3, 4, 5, 6 and 70")


def _run_retrodict(output: Path) -> int:
    return main([
        "retrodict", "--preset", "single-thermal", "--tf", "5e-4",
        "--family", "ols", "--shots", "50", "--seed", "3", "--output", str(output),
    ])


def test_cli_retrodict_is_reproducible(tmp_path):
    """Same inputs write byte-identical outputs"""
    print("\n" + "=" * 60)
    print("TEST: CLI reproducibility")
    print("=" * 60)

    assert main(["validate-config", "--preset", "single-thermal"]) == 0

    first, second = tmp_path / "a", tmp_path / "b"
    assert _run_retrodict(first) == 0
    assert _run_retrodict(second) == 0

    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert {"estimates.csv", "sample_cov.csv", "inferred_cov.csv", "retrodiction.json"} <= set(names)
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    summary = json.loads((first / "retrodiction.json").read_text())
    assert summary["family"] == "ols"
    assert summary["n_s"] == 50
    assert summary["provenance"]["seed"] == 3
    assert len(pd.read_csv(first / "estimates.csv")) == 50
    print(f"✓ {len(names)} identical files")


def test_cli_stored_records(tmp_path):
    """simulate, then retrodict and psd from the stored file"""
    print("\n" + "=" * 60)
    print("TEST: CLI with stored records")
    print("=" * 60)

    system = ["--preset", "single-thermal", "--tf", "5e-4"]
    assert main(["simulate", *system, "--shots", "20", "--output", str(tmp_path)]) == 0
    records = tmp_path / "records.npz"
    assert records.exists()

    out = tmp_path / "retro"
    assert main(["retrodict", *system, "--records", str(records), "--family", "exp",
                 "--output", str(out)]) == 0
    assert len(pd.read_csv(out / "estimates.csv")) == 20

    assert main(["psd", *system, "--records", str(records), "--segments", "4",
                 "--output", str(out)]) == 0
    psd = pd.read_csv(out / "psd.csv")
    assert {"frequency_hz", "psd", "model"} <= set(psd.columns)

    mismatch = main(["retrodict", "--preset", "single-thermal", "--tf", "1e-3",
                     "--records", str(records), "--family", "ols", "--output", str(out)])
    assert mismatch == 4

    same_length = main(["retrodict", "--preset", "single-thermal", "--fs", "1e7", "--tf", "2.5e-4",
                        "--records", str(records), "--family", "ols", "--output", str(out)])
    assert same_length == 4

    assert main(["simulate", *system, "--shots", "5", "--records", "records.csv",
                 "--output", str(tmp_path)]) == 0
    assert main(["retrodict", *system, "--records", str(tmp_path / "records.csv"), "--family", "ols",
                 "--output", str(tmp_path / "from_csv")]) == 0
    print("✓ Records reused, length or rate mismatch exits with 4")


def test_cli_sweep_and_errors(tmp_path):
    """Small SQL sweep and a missing configuration file"""
    print("\n" + "=" * 60)
    print("TEST: CLI sweep and errors")
    print("=" * 60)

    code = main([
        "sweep-sql", "--preset", "single-sql", "--tf", "5e-4",
        "--c-min", "1", "--c-max", "3", "--per-decade", "4", "--optimum-only",
        "--workers", "1", "--output", str(tmp_path),
    ])
    assert code == 0
    rows = pd.read_csv(tmp_path / "sweep_sql.csv")
    summary = pd.read_csv(tmp_path / "sweep_sql_summary.csv")
    assert len(rows) == 3 and len(summary) == 3
    assert (rows["status"] == "ok").all()

    assert main(["validate-config", "--config", str(tmp_path / "missing.json")]) == 3
    print("✓ Sweep tables written, missing config exits with 3")


def run_all_tests():
    """Run all sweep and CLI tests"""
    print("\n" + "=" * 80)
    print(" " * 26 + "SWEEPS AND CLI TEST SUITE")
    print("=" * 80)

    try:
        test_sweep_grids()
        test_apply_point()
        test_run_points_tags_failures()
        test_sql_sweep_surface()
        test_sql_optimum_curve()
        test_sql_sweep_rejects_bad_requests()
        test_two_mode_cooperativity_optimum()
        test_two_mode_cross_error_grows_when_unresolved()
        test_two_mode_monte_carlo_task()
        test_exit_codes()
        with tempfile.TemporaryDirectory() as tmp:
            test_cli_retrodict_is_reproducible(Path(tmp) / "repro")
            test_cli_stored_records(Path(tmp) / "stored")
            test_cli_sweep_and_errors(Path(tmp) / "sweep")

        print("\n" + "=" * 80)
        print(" " * 30 + "ALL TESTS PASSED")
        print("=" * 80)

    except AssertionError as e:
        print(f"\n❌ Assertion failed: {e}")
        logger.error("Test assertion failed", exc_info=True)
        raise


if __name__ == "__main__":
    run_all_tests()
