"""
Test Record Store
Record and filter-bank containers on disk
"""

import sys
import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
sys.path.insert(0, project_root)
from app.modules.filters.banks import exp_filters
from app.modules.physics.config_loader import config_from_dict
from app.modules.simulators.simulator import run_ensemble
from app.modules.states.gaussian import thermal_state
from app.services.record_store import load_bank, load_records, save_bank, save_records
from app.core.exceptions import RecordIOError
from app.core.logging import setup_logging, get_logger

setup_logging()
logger = get_logger(__name__)


def small_ensemble(n_shots=4):
    config = config_from_dict({
        "cavity": {"kappa": 5e6, "nbar": 1e4, "epsilon": 1.0},
        "oscillators": [
            {"omega": 125e3, "gamma": 2e3, "nu": 1.0, "cooperativity": 3.0, "sigma": 0.2e3},
        ],
        "grid": {"fs": 3e6, "tf": 1e-4},
    })
    return config, run_ensemble(config, thermal_state([1.0]), n_shots, master_seed=17)


def test_records_round_trip(tmp_path):
    """Samples, seeds and realized frequencies survive both containers"""
    print("\n" + "=" * 60)
    print("TEST: Record round trip")
    print("=" * 60)

    config, ensemble = small_ensemble()
    for suffix in (".npz", ".csv"):
        path = save_records(tmp_path / f"records{suffix}", ensemble.records, config.grid)
        records, grid = load_records(path)
        assert grid == config.grid
        assert len(records) == ensemble.n_shots
        for original, loaded in zip(ensemble.records, records):
            assert np.array_equal(original.samples, loaded.samples)
            assert loaded.seed == 17
            assert loaded.shot_index == original.shot_index
            assert np.allclose(loaded.omega_realized, original.omega_realized, rtol=1e-12)
        print(f"✓ {suffix}: {len(records)} records")


def test_identical_ensembles_give_identical_files(tmp_path):
    """No timestamps in the binary container"""
    print("\n" + "=" * 60)
    print("TEST: Deterministic files")
    print("=" * 60)

    config, ensemble = small_ensemble()
    first = save_records(tmp_path / "a.npz", ensemble.records, config.grid)
    _, again = small_ensemble()
    second = save_records(tmp_path / "b.npz", again.records, config.grid)
    assert first.read_bytes() == second.read_bytes()
    print("✓ Byte-identical")


def test_record_errors(tmp_path):
    """Unknown suffix, empty input, missing file, CSV without grid header"""
    print("\n" + "=" * 60)
    print("TEST: Record errors")
    print("=" * 60)

    config, ensemble = small_ensemble()
    with pytest.raises(RecordIOError):
        save_records(tmp_path / "records.h5", ensemble.records, config.grid)
    with pytest.raises(RecordIOError):
        save_records(tmp_path / "records.npz", [], config.grid)
    with pytest.raises(RecordIOError):
        load_records(tmp_path / "missing.npz")

    (tmp_path / "broken.npz").write_bytes(b"not a zip")
    with pytest.raises(RecordIOError):
        load_records(tmp_path / "broken.npz")

    (tmp_path / "gridless.csv").write_text("time_s,0:0:125000.0\n0.0,1.0\n1e-6,2.0\n")
    with pytest.raises(RecordIOError):
        load_records(tmp_path / "gridless.csv")
    print("✓ RecordIOError in every case")


def test_bank_round_trip(tmp_path):
    """Weights, J and decay rates of an exponential bank"""
    print("\n" + "=" * 60)
    print("TEST: Filter bank round trip")
    print("=" * 60)

    config, _ = small_ensemble()
    bank = exp_filters(config)
    loaded = load_bank(save_bank(tmp_path / "bank.npz", bank))
    assert loaded.family == bank.family
    assert np.array_equal(loaded.m, bank.m)
    assert np.array_equal(loaded.J, bank.J)
    assert loaded.cond == bank.cond
    assert loaded.gammas == pytest.approx(bank.gammas)
    assert loaded.grid.nt == bank.grid.nt
    print(f"✓ {loaded.label()} bank restored")


def run_all_tests():
    """Run all record store tests"""
    print("\n" + "=" * 80)
    print(" " * 27 + "RECORD STORE TEST SUITE")
    print("=" * 80)

    try:
        with tempfile.TemporaryDirectory() as tmp:
            for i, test in enumerate((
                test_records_round_trip,
                test_identical_ensembles_give_identical_files,
                test_record_errors,
                test_bank_round_trip,
            )):
                path = Path(tmp) / str(i)
                path.mkdir()
                test(path)

        print("\n" + "=" * 80)
        print(" " * 30 + "ALL TESTS PASSED")
        print("=" * 80)

    except AssertionError as e:
        print(f"\n❌ Assertion failed: {e}")
        logger.error("Test assertion failed", exc_info=True)
        raise


if __name__ == "__main__":
    run_all_tests()
