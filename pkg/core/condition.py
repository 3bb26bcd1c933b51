"""
Machine condition labels and the on-disk dataset layout
"""
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from core.errors import ManifestError

logger = logging.getLogger("Condition")

MANIFEST_NAME = "manifest.txt"
DEFAULT_RATE_HZ = 20000.0
DEFAULT_DURATION_S = 5.0


class ConditionLabel(IntEnum):
    NORMAL = 0
    MISALIGNMENT = 1
    UNBALANCE = 2
    BEARING_FAULT = 3

    @property
    def display_name(self):
        return _DISPLAY_NAMES[self]

    @property
    def key(self):
        """Manifest key and default directory name"""
        return _KEYS[self]

    @classmethod
    def parse(cls, text):
        """Resolve a label from its code, manifest key or display name"""
        value = str(text).strip()
        if value.lstrip("-").isdigit():
            try:
                return cls(int(value))
            except ValueError:
                raise ManifestError(f"Unknown condition code: {value}")
        lowered = value.lower()
        for label in cls:
            if lowered in (label.key, label.display_name.lower(), label.name.lower()):
                return label
        raise ManifestError(f"Unknown condition: {value!r}")


_DISPLAY_NAMES = {
    ConditionLabel.NORMAL: "Normal",
    ConditionLabel.MISALIGNMENT: "Misalignment",
    ConditionLabel.UNBALANCE: "Unbalance",
    ConditionLabel.BEARING_FAULT: "BearingFault",
}

_KEYS = {
    ConditionLabel.NORMAL: "normal",
    ConditionLabel.MISALIGNMENT: "misalignment",
    ConditionLabel.UNBALANCE: "unbalance",
    ConditionLabel.BEARING_FAULT: "bearing",
}


@dataclass(frozen=True)
class DatasetLayout:
    """Directory names per condition plus the rate/duration records should have"""
    directories: dict = field(default_factory=dict)
    expected_rate_hz: float = DEFAULT_RATE_HZ
    expected_duration_s: float = DEFAULT_DURATION_S

    @classmethod
    def default(cls):
        return cls(directories={label: (label.key,) for label in ConditionLabel})

    def to_text(self):
        """Render the layout as manifest text"""
        lines = [f"{label.key}={','.join(self.directories[label])}" for label in ConditionLabel]
        lines.append(f"expected_rate_hz={self.expected_rate_hz:.17g}")
        lines.append(f"expected_duration_s={self.expected_duration_s:.17g}")
        return "\n".join(lines) + "\n"


def load_manifest(path):
    """
    Read a key=value dataset manifest.

    Condition keys map to one directory name or a comma-separated list, so both
    unbalance severities can be listed under the single unbalance label.
    Missing condition keys keep their default directory name.

    Raises:
    - ManifestError: On unreadable lines, unknown keys or bad numbers
    """
    path = Path(path)
    defaults = DatasetLayout.default()
    directories = dict(defaults.directories)
    rate = defaults.expected_rate_hz
    duration = defaults.expected_duration_s
    condition_keys = {label.key: label for label in ConditionLabel}

    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError(f"{path}:{number}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key in condition_keys:
            names = tuple(name.strip() for name in value.split(",") if name.strip())
            if not names:
                raise ManifestError(f"{path}:{number}: no directory given for {key}")
            directories[condition_keys[key]] = names
        elif key in ("expected_rate_hz", "expected_duration_s"):
            try:
                number_value = float(value)
            except ValueError:
                raise ManifestError(f"{path}:{number}: {key} must be a number, got {value!r}")
            if number_value <= 0:
                raise ManifestError(f"{path}:{number}: {key} must be positive")
            if key == "expected_rate_hz":
                rate = number_value
            else:
                duration = number_value
        else:
            raise ManifestError(f"{path}:{number}: unknown manifest key {key!r}")

    logger.debug(f"Loaded manifest {path}")
    return DatasetLayout(directories=directories, expected_rate_hz=rate,
                         expected_duration_s=duration)
