"""
Record Store
Binary (.npz) and CSV containers for homodyne records and filter banks

Binary layout: a zip of .npy arrays, little-endian float64 unless noted
    samples         (nt, n_s)   one column per record
    omega_realized  (n_s, N)    rad/s
    shot_index      (n_s,)      int64
    seed            ()          int64, master seed
    grid            (2,)        fs (Hz), tf (s)
Entries carry a fixed timestamp so identical ensembles give identical files.

CSV layout: column `time_s:fs:tf` carrying the grid (Hz, s), then one column
per record headed `seed:shot:f1;f2;...` with the realized frequencies in Hz.
"""

import math
import zipfile
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from app.models.filters import FilterBank, FilterFamily
from app.models.records import HomodyneRecord
from app.models.system import SamplingGrid
from app.core.exceptions import RecordIOError
from app.core.logging import get_logger

logger = get_logger(__name__)

ZIP_DATE = (1980, 1, 1, 0, 0, 0)
CSV_FLOAT_FORMAT = "%.17g"
TIME_COLUMN = "time_s"


def _write_npz(path: Path, arrays: Dict[str, np.ndarray]):
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, arr in arrays.items():
            info = zipfile.ZipInfo(f"{name}.npy", date_time=ZIP_DATE)
            with zf.open(info, "w", force_zip64=True) as f:
                np.lib.format.write_array(f, np.asarray(arr), allow_pickle=False)


def _read_npz(path: Path) -> Dict[str, np.ndarray]:
    try:
        with np.load(path, allow_pickle=False) as data:
            return {name: data[name] for name in data.files}
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        raise RecordIOError(f"cannot read {path}: {e}")


def _format(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower()
    if suffix not in (".npz", ".csv"):
        raise RecordIOError(f"unsupported record container '{suffix}' (use .npz or .csv)")
    return suffix


def save_records(path: Union[str, Path], records: List[HomodyneRecord], grid: SamplingGrid) -> Path:
    """
    Write records to a .npz or .csv container

    Args:
        path: Target file; the suffix selects the format
        records: Records of one ensemble (same grid and master seed)
        grid: Their sampling grid

    Returns:
        Path: Written file
    """
    path = Path(path)
    fmt = _format(path)
    if not records:
        raise RecordIOError("no records to write")
    if any(r.nt != grid.nt for r in records):
        raise RecordIOError(f"records do not all have grid length {grid.nt}")
    path.parent.mkdir(parents=True, exist_ok=True)

    samples = np.column_stack([r.samples for r in records]).astype("<f8")
    omegas = np.vstack([r.omega_realized for r in records]).astype("<f8")
    if fmt == ".npz":
        _write_npz(path, {
            "samples": samples,
            "omega_realized": omegas,
            "shot_index": np.array([r.shot_index for r in records], dtype="<i8"),
            "seed": np.array(records[0].seed, dtype="<i8"),
            "grid": np.array([grid.fs, grid.tf], dtype="<f8"),
        })
    else:
        columns = {f"{TIME_COLUMN}:{grid.fs!r}:{grid.tf!r}": grid.times()}
        for r in records:
            freqs = ";".join(repr(float(w) / (2 * math.pi)) for w in r.omega_realized)
            columns[f"{r.seed}:{r.shot_index}:{freqs}"] = r.samples
        pd.DataFrame(columns).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)

    logger.info(f"💾 Wrote {len(records)} records to {path}")
    return path


def _parse_header(header: str) -> Tuple[int, int, np.ndarray]:
    try:
        seed, shot, freqs = header.split(":", 2)
        omegas = np.array([2 * math.pi * float(f) for f in freqs.split(";")])
        return int(seed), int(shot), omegas
    except ValueError:
        raise RecordIOError(f"malformed record column header '{header}'")


def _parse_grid_header(header: str) -> SamplingGrid:
    name, _, rest = header.partition(":")
    try:
        if name != TIME_COLUMN:
            raise ValueError(name)
        fs, tf = rest.split(":")
        return SamplingGrid(fs=float(fs), tf=float(tf))
    except ValueError:
        raise RecordIOError(f"first column header '{header}' is not '{TIME_COLUMN}:fs:tf'")


def load_records(path: Union[str, Path]) -> Tuple[List[HomodyneRecord], SamplingGrid]:
    """
    Read records written by save_records

    Returns:
        Tuple: (records, grid)
    """
    path = Path(path)
    fmt = _format(path)
    if not path.exists():
        raise RecordIOError(f"record file not found: {path}")

    if fmt == ".npz":
        data = _read_npz(path)
        missing = {"samples", "omega_realized", "shot_index", "seed", "grid"} - set(data)
        if missing:
            raise RecordIOError(f"{path} lacks arrays: {', '.join(sorted(missing))}")
        fs, tf = (float(x) for x in data["grid"])
        grid = SamplingGrid(fs=fs, tf=tf)
        seed = int(data["seed"])
        records = [
            HomodyneRecord(
                samples=data["samples"][:, k],
                seed=seed,
                shot_index=int(data["shot_index"][k]),
                omega_realized=data["omega_realized"][k],
            )
            for k in range(data["samples"].shape[1])
        ]
    else:
        try:
            frame = pd.read_csv(path, float_precision="round_trip")
        except (OSError, ValueError) as e:
            raise RecordIOError(f"cannot read {path}: {e}")
        if len(frame.columns) < 2 or len(frame) < 2:
            raise RecordIOError(f"{path} holds no records")
        grid = _parse_grid_header(str(frame.columns[0]))
        if grid.nt != len(frame):
            raise RecordIOError(f"{path} has {len(frame)} rows, its grid header implies {grid.nt}")
        records = []
        for column in frame.columns[1:]:
            seed, shot, omegas = _parse_header(column)
            records.append(HomodyneRecord(
                samples=frame[column].to_numpy(),
                seed=seed,
                shot_index=shot,
                omega_realized=omegas,
            ))

    logger.info(f"📂 Loaded {len(records)} records ({grid.nt} samples each) from {path}")
    return records, grid


def save_bank(path: Union[str, Path], bank: FilterBank) -> Path:
    """Write a filter bank (family, weights, J, cond, grid, decay rates) as .npz"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_npz(path, {
        "family": np.array(bank.family.value),
        "m": bank.m.astype("<f8"),
        "J": bank.J.astype("<f8"),
        "cond": np.array(bank.cond, dtype="<f8"),
        "grid": np.array([bank.grid.fs, bank.grid.tf], dtype="<f8"),
        "gammas": np.array(bank.gammas or [], dtype="<f8"),
        "decimation": np.array(bank.decimation, dtype="<i8"),
    })
    return path


def load_bank(path: Union[str, Path]) -> FilterBank:
    """Read a bank written by save_bank"""
    data = _read_npz(Path(path))
    fs, tf = (float(x) for x in data["grid"])
    gammas = data["gammas"].tolist()
    return FilterBank(
        family=FilterFamily(str(data["family"])),
        m=data["m"],
        J=data["J"],
        cond=float(data["cond"]),
        grid=SamplingGrid(fs=fs, tf=tf),
        gammas=gammas or None,
        decimation=int(data["decimation"]),
    )
