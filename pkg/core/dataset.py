"""
Discovery, parsing and writing of triaxial vibration records
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from core.condition import ConditionLabel, DatasetLayout
from core.errors import (
    EmptyConditionDir, MalformedCsv, MissingConditionDir, NonMonotonicTime, TooShort
)

logger = logging.getLogger("Dataset")

COLUMNS = ("time", "x", "y", "z")
HEADER = "Time,X,Y,Z"
TOLERANCE = 0.05


class AxisSample(NamedTuple):
    time: float
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class VibrationRecord:
    """
    One triaxial acceleration record (values in g).

    Rows flagged in ``missing`` held an unparseable or non-finite cell; they
    stay in the arrays and are dropped by ``usable()``.
    """
    time: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    missing: np.ndarray
    label: ConditionLabel
    source_path: str = ""
    declared_rate_hz: float = None

    def __len__(self):
        return int(self.time.shape[0])

    @property
    def missing_count(self):
        return int(np.count_nonzero(self.missing))

    @property
    def duration_s(self):
        valid = self.time[~self.missing]
        return float(valid[-1] - valid[0])

    @property
    def sample_rate_hz(self):
        """(n-1)/(t_last - t_first) over usable rows, unless a rate was declared"""
        if self.declared_rate_hz is not None:
            return float(self.declared_rate_hz)
        valid = self.time[~self.missing]
        return (valid.shape[0] - 1) / float(valid[-1] - valid[0])

    def samples(self):
        """Iterate rows as AxisSample tuples"""
        for row in zip(self.time, self.x, self.y, self.z):
            yield AxisSample(*(float(value) for value in row))

    def usable(self):
        """Return this record without its missing rows"""
        keep = ~self.missing
        return VibrationRecord(
            time=self.time[keep], x=self.x[keep], y=self.y[keep], z=self.z[keep],
            missing=np.zeros(int(keep.sum()), dtype=bool), label=self.label,
            source_path=self.source_path, declared_rate_hz=self.declared_rate_hz)

    def axes(self):
        """Stack the three axes into an array of shape (3, n)"""
        return np.vstack([self.x, self.y, self.z])


def scan_dataset(root_dir, layout=None):
    """
    List every record file under the dataset root with its condition label.

    Parameters:
    - root_dir: Dataset root holding one directory per condition
    - layout: DatasetLayout naming the directories (defaults when None)

    Returns:
    - List of (file_path, ConditionLabel) sorted by path

    Raises:
    - MissingConditionDir: If a configured directory does not exist
    - EmptyConditionDir: If a condition has no CSV files
    """
    root = Path(root_dir)
    layout = layout or DatasetLayout.default()
    if not root.is_dir():
        raise MissingConditionDir(f"Dataset root not found: {root}")

    entries = []
    for label in ConditionLabel:
        files = []
        for name in layout.directories[label]:
            directory = root / name
            if not directory.is_dir():
                raise MissingConditionDir(
                    f"Directory for {label.display_name} not found: {directory}")
            files.extend(path for path in directory.iterdir()
                         if path.is_file() and path.suffix.lower() == ".csv")
        if not files:
            raise EmptyConditionDir(f"No CSV files for {label.display_name} under {root}")
        logger.debug(f"{label.display_name}: {len(files)} files")
        entries.extend((path, label) for path in files)

    entries.sort(key=lambda entry: str(entry[0]))
    logger.info(f"Scanned {root}: {len(entries)} records")
    return entries


def parse_record(file_path, label, expected_rate_hz=None, expected_duration_s=None):
    """
    Parse one Time,X,Y,Z CSV file into a VibrationRecord.

    Cells that fail to parse or are non-finite mark their whole row missing;
    the row is kept so that later stages decide what to drop.

    Raises:
    - MalformedCsv: If the header or column count is wrong
    - NonMonotonicTime: If usable time stamps are not strictly increasing
    - TooShort: If fewer than two usable rows remain
    """
    path = Path(file_path)
    try:
        frame = pd.read_csv(path, dtype=str, na_filter=False, skipinitialspace=True,
                            encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise MalformedCsv(f"{path} is empty")
    except pd.errors.ParserError as exc:
        raise MalformedCsv(f"{path} has inconsistent columns: {exc}")
    except UnicodeDecodeError:
        raise MalformedCsv(f"{path} is not UTF-8 text")

    header = [str(column).strip().lower() for column in frame.columns]
    if tuple(header) != COLUMNS:
        raise MalformedCsv(f"{path} must have header {HEADER}, got {','.join(map(str, frame.columns))}")

    # with na_filter off only absent trailing fields come back as NaN
    absent = frame.isna().any(axis=1).to_numpy()
    if absent.any():
        row = int(np.argmax(absent)) + 2
        raise MalformedCsv(f"{path}:{row}: expected 4 fields ({HEADER})")

    time, x, y, z = (_parse_column(frame[column]) for column in frame.columns)
    missing = ~(np.isfinite(time) & np.isfinite(x) & np.isfinite(y) & np.isfinite(z))

    usable_count = int(missing.size - np.count_nonzero(missing))
    if usable_count < 2:
        raise TooShort(f"{path} has {usable_count} usable rows, need at least 2")
    if np.any(np.diff(time[~missing]) <= 0):
        raise NonMonotonicTime(f"{path}: time column is not strictly increasing")
    if missing.any():
        logger.debug(f"{path}: {int(missing.sum())} rows marked missing")

    record = VibrationRecord(time=time, x=x, y=y, z=z, missing=missing,
                             label=ConditionLabel(label), source_path=str(path))
    _check_expectations(record, expected_rate_hz, expected_duration_s)
    return record


def _parse_column(cells):
    """
    Text cells to float64, NaN where a cell is empty or not a number.

    Accepted cells are converted with float() so 17-digit values round-trip
    exactly.
    """
    text = cells.str.strip()
    parsed = pd.to_numeric(text, errors="coerce")
    values = parsed.to_numpy(dtype=np.float64)
    valid = parsed.notna().to_numpy()
    values[valid] = text.to_numpy(dtype=object)[valid].astype(np.float64)
    return values


def _check_expectations(record, expected_rate_hz, expected_duration_s):
    if expected_rate_hz:
        rate = record.sample_rate_hz
        if abs(rate - expected_rate_hz) > TOLERANCE * expected_rate_hz:
            logger.warning(
                f"{record.source_path}: sample rate {rate:.1f} Hz is not within 5% of "
                f"{expected_rate_hz:.1f} Hz")
    if expected_duration_s:
        duration = record.duration_s
        if abs(duration - expected_duration_s) > TOLERANCE * expected_duration_s:
            logger.warning(
                f"{record.source_path}: duration {duration:.3f} s, expected about "
                f"{expected_duration_s:.3f} s")


def serialize_record(record, file_path, float_format="%.17g"):
    """
    Write a record in the ingest CSV format.

    The default float format round-trips exactly through parse_record. Missing
    rows are written with empty cells.
    """
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({
        "Time": record.time, "X": record.x, "Y": record.y, "Z": record.z,
    })
    frame.loc[record.missing, :] = np.nan
    frame.to_csv(path, index=False, float_format=float_format, na_rep="",
                 lineterminator="\n", encoding="utf-8")
    return path
