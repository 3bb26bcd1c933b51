import logging
import os

import numpy as np
import pytest

from conftest import TABLE_EXCERPT, make_record
from core.condition import ConditionLabel, DatasetLayout
from core.dataset import parse_record, scan_dataset, serialize_record
from core.errors import (
    EmptyConditionDir, MalformedCsv, MissingConditionDir, NonMonotonicTime, TooShort
)


def _tree(root, per_condition=3, names=("normal", "misalignment", "unbalance", "bearing")):
    for name in names:
        (root / name).mkdir(parents=True, exist_ok=True)
        for index in range(per_condition):
            (root / name / f"{name}_{index:03d}.csv").write_text(TABLE_EXCERPT, encoding="utf-8")
    return root


def test_parse_table_excerpt(write_csv):
    record = parse_record(write_csv(TABLE_EXCERPT), ConditionLabel.NORMAL)
    first = next(record.samples())
    assert first == (0.004516, -0.102961, 0.030537, 0.114270)
    assert len(record) == 5
    assert record.missing_count == 0
    assert record.label is ConditionLabel.NORMAL


def test_header_is_case_insensitive(write_csv):
    text = TABLE_EXCERPT.replace("Time,X,Y,Z", "time, x, Y , z")
    record = parse_record(write_csv(text), ConditionLabel.UNBALANCE)
    assert len(record) == 5


def test_single_data_row_is_too_short(write_csv):
    with pytest.raises(TooShort):
        parse_record(write_csv("Time,X,Y,Z\n0.0,1.0,2.0,3.0\n"), ConditionLabel.NORMAL)


def test_rows_with_bad_cells_are_marked_missing(write_csv):
    text = "Time,X,Y,Z\n0.0,1,2,3\n0.1,abc,2,3\n0.2,1,,3\n0.3,1,2,nan\n0.4,1,2,3\n"
    record = parse_record(write_csv(text), ConditionLabel.NORMAL)
    assert len(record) == 5
    assert record.missing.tolist() == [False, True, True, True, False]
    assert len(record.usable()) == 2


def test_too_few_usable_rows_after_marking(write_csv):
    text = "Time,X,Y,Z\n0.0,1,2,3\n0.1,abc,2,3\n0.2,1,,3\n"
    with pytest.raises(TooShort):
        parse_record(write_csv(text), ConditionLabel.NORMAL)


@pytest.mark.parametrize("text", [
    "Time,X,Y\n0.0,1,2\n0.1,1,2\n",
    "A,B,C,D\n0.0,1,2,3\n0.1,1,2,3\n",
    "Time,X,Y,Z\n0.0,1,2,3\n0.1,1,2,3,4\n",
    "Time,X,Y,Z\n0.0,1,2,3\n0.1,1,2\n0.2,1,2,3\n0.3,1,2,3\n",
    "",
])
def test_malformed_csv(write_csv, text):
    with pytest.raises(MalformedCsv):
        parse_record(write_csv(text), ConditionLabel.NORMAL)


def test_short_row_is_reported_with_its_line(write_csv):
    text = "Time,X,Y,Z\n0.0,1,2,3\n0.1,1,2\n0.2,1,2,3\n"
    with pytest.raises(MalformedCsv, match=r":3: expected 4 fields"):
        parse_record(write_csv(text), ConditionLabel.NORMAL)


def test_time_must_increase(write_csv):
    text = "Time,X,Y,Z\n0.0,1,2,3\n0.2,1,2,3\n0.1,1,2,3\n"
    with pytest.raises(NonMonotonicTime):
        parse_record(write_csv(text), ConditionLabel.NORMAL)


def test_sample_rate_from_time_column(tmp_path):
    n = 100000
    record = make_record(np.zeros(n), rate=20000.0)
    path = serialize_record(record, tmp_path / "long.csv")
    parsed = parse_record(path, ConditionLabel.NORMAL)
    assert parsed.sample_rate_hz == pytest.approx(20000.0, rel=0.05)
    assert parsed.duration_s == pytest.approx((n - 1) / 20000.0)


def test_rate_mismatch_warns_without_failing(write_csv, caplog):
    with caplog.at_level(logging.WARNING, logger="Dataset"):
        parse_record(write_csv(TABLE_EXCERPT), ConditionLabel.NORMAL, expected_rate_hz=1000.0)
    assert any("sample rate" in message for message in caplog.messages)


def test_serialize_then_parse_is_identity(tmp_path, rng):
    record = make_record(rng.standard_normal(50), rng.standard_normal(50),
                         rng.standard_normal(50) * 1e-7, rate=20000.0)
    parsed = parse_record(serialize_record(record, tmp_path / "r.csv"), ConditionLabel.NORMAL)
    for original, restored in zip((record.time, record.x, record.y, record.z),
                                  (parsed.time, parsed.x, parsed.y, parsed.z)):
        assert np.array_equal(original, restored)


def test_serialized_missing_rows_come_back_missing(tmp_path):
    missing = np.array([False, True, False, False])
    record = make_record([1.0, 2.0, 3.0, 4.0], missing=missing)
    parsed = parse_record(serialize_record(record, tmp_path / "r.csv"), ConditionLabel.NORMAL)
    assert parsed.missing.tolist() == missing.tolist()


def test_scan_matches_independent_walk(tmp_path):
    root = _tree(tmp_path / "data")
    entries = scan_dataset(root)
    walked = sorted(os.path.join(directory, name)
                    for directory, _, files in os.walk(root) for name in files)
    assert [str(path) for path, _ in entries] == walked
    assert len(entries) == 12
    counts = {label: sum(1 for _, found in entries if found is label) for label in ConditionLabel}
    assert set(counts.values()) == {3}


def test_scan_labels_by_parent_directory(tmp_path):
    root = _tree(tmp_path / "data", per_condition=1)
    labels = {path.parent.name: label for path, label in scan_dataset(root)}
    assert labels == {"normal": ConditionLabel.NORMAL,
                      "misalignment": ConditionLabel.MISALIGNMENT,
                      "unbalance": ConditionLabel.UNBALANCE,
                      "bearing": ConditionLabel.BEARING_FAULT}


def test_scan_is_deterministic(tmp_path):
    root = _tree(tmp_path / "data")
    assert scan_dataset(root) == scan_dataset(root)


def test_both_unbalance_severities_share_one_label(tmp_path):
    root = _tree(tmp_path / "data", names=("normal", "misalignment", "unbalance_6g",
                                            "unbalance_27g", "bearing"))
    layout = DatasetLayout(directories={
        ConditionLabel.NORMAL: ("normal",),
        ConditionLabel.MISALIGNMENT: ("misalignment",),
        ConditionLabel.UNBALANCE: ("unbalance_6g", "unbalance_27g"),
        ConditionLabel.BEARING_FAULT: ("bearing",),
    })
    entries = scan_dataset(root, layout)
    unbalance = [path for path, label in entries if label is ConditionLabel.UNBALANCE]
    assert len(unbalance) == 6


def test_missing_condition_directory(tmp_path):
    root = _tree(tmp_path / "data", names=("normal", "misalignment", "unbalance"))
    with pytest.raises(MissingConditionDir):
        scan_dataset(root)


def test_empty_condition_directory(tmp_path):
    root = _tree(tmp_path / "data", names=("misalignment", "unbalance", "bearing"))
    (root / "normal").mkdir()
    with pytest.raises(EmptyConditionDir):
        scan_dataset(root)
