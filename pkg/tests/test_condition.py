import pytest

from core.condition import ConditionLabel, DatasetLayout, load_manifest
from core.errors import ManifestError


def test_codes_are_fixed():
    assert [int(label) for label in ConditionLabel] == [0, 1, 2, 3]
    assert [label.display_name for label in ConditionLabel] == [
        "Normal", "Misalignment", "Unbalance", "BearingFault"]


@pytest.mark.parametrize("text, expected", [
    ("0", ConditionLabel.NORMAL),
    ("3", ConditionLabel.BEARING_FAULT),
    ("bearing", ConditionLabel.BEARING_FAULT),
    ("BearingFault", ConditionLabel.BEARING_FAULT),
    (" Misalignment ", ConditionLabel.MISALIGNMENT),
    ("unbalance", ConditionLabel.UNBALANCE),
])
def test_parse_label(text, expected):
    assert ConditionLabel.parse(text) is expected


@pytest.mark.parametrize("text", ["4", "-1", "looseness"])
def test_parse_unknown_label(text):
    with pytest.raises(ManifestError):
        ConditionLabel.parse(text)


def test_manifest_lists_and_defaults(tmp_path):
    path = tmp_path / "manifest.txt"
    path.write_text("# lab layout\nunbalance = unb_6g, unb_27g\nexpected_rate_hz=10000\n",
                    encoding="utf-8")
    layout = load_manifest(path)
    assert layout.directories[ConditionLabel.UNBALANCE] == ("unb_6g", "unb_27g")
    assert layout.directories[ConditionLabel.NORMAL] == ("normal",)
    assert layout.expected_rate_hz == 10000.0
    assert layout.expected_duration_s == 5.0


@pytest.mark.parametrize("text", [
    "vibration=dir\n",
    "normal\n",
    "expected_rate_hz=fast\n",
    "expected_duration_s=-5\n",
    "bearing= ,\n",
])
def test_bad_manifest(tmp_path, text):
    path = tmp_path / "manifest.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_layout_text_reads_back(tmp_path):
    layout = DatasetLayout(
        directories={label: (label.key, f"{label.key}_extra") for label in ConditionLabel},
        expected_rate_hz=5000.0, expected_duration_s=0.5)
    path = tmp_path / "manifest.txt"
    path.write_text(layout.to_text(), encoding="utf-8")
    assert load_manifest(path) == layout
