"""
Synthetic triaxial vibration records with per-condition spectral signatures
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.condition import ConditionLabel, DatasetLayout, MANIFEST_NAME
from core.dataset import VibrationRecord, serialize_record
from core.errors import InvalidConfig
from utils.parallel import ordered_map

logger = logging.getLogger("SignalGenerator")

BASE_AMPLITUDE_G = 0.05
UNBALANCE_GAIN = 6.0
MISALIGNMENT_AMPLITUDE_G = 0.2
BEARING_RATE_RATIO = 3.5
BEARING_RING_HZ = 2000.0
BEARING_DECAY_S = 0.001
BEARING_AMPLITUDE_G = 0.5

# (gain, phase) per axis; y leads x by a quarter turn
AXIS_COUPLING = ((1.0, 0.0), (0.8, np.pi / 2), (0.5, 0.0))


@dataclass(frozen=True)
class SynthConfig:
    rotation_hz: float = 30.0
    sample_rate_hz: float = 20000.0
    duration_s: float = 5.0
    noise_std: float = 0.02
    seed: int = 42
    per_class_count: int = 1000

    def validate(self):
        """
        Raises:
        - InvalidConfig: If the rate cannot represent every generated component
        """
        highest = max(2.0 * self.rotation_hz, BEARING_RING_HZ,
                      BEARING_RATE_RATIO * self.rotation_hz)
        if self.rotation_hz <= 0:
            raise InvalidConfig(f"rotation_hz must be positive, got {self.rotation_hz}")
        if self.sample_rate_hz <= 2.0 * highest:
            raise InvalidConfig(
                f"sample_rate_hz {self.sample_rate_hz:g} must exceed twice the highest "
                f"component ({highest:g} Hz)")
        if self.duration_s <= 0:
            raise InvalidConfig(f"duration_s must be positive, got {self.duration_s}")
        if self.noise_std < 0:
            raise InvalidConfig(f"noise_std must be non-negative, got {self.noise_std}")
        if self.per_class_count < 1:
            raise InvalidConfig(f"per_class_count must be at least 1, got {self.per_class_count}")
        if int(round(self.duration_s * self.sample_rate_hz)) < 2:
            raise InvalidConfig("duration_s * sample_rate_hz must give at least 2 samples")
        return self


def generate(config, label, record_index=0):
    """
    Generate one labeled record.

    Normal is a 1x rotation tone plus noise; unbalance boosts the 1x tone on
    x and y; misalignment adds a 2x harmonic; a bearing fault adds a train of
    decaying 2 kHz bursts repeating at 3.5x the rotation rate. Output depends
    only on (config, label, record_index).

    Raises:
    - InvalidConfig: If the configuration is invalid
    """
    config.validate()
    label = ConditionLabel(label)
    rng = np.random.default_rng([int(config.seed), int(label), int(record_index)])
    n = int(round(config.duration_s * config.sample_rate_hz))
    t = np.arange(n) / config.sample_rate_hz
    rotation = 2 * np.pi * config.rotation_hz * t

    axes = []
    for axis, (gain, phase) in enumerate(AXIS_COUPLING):
        amplitude = BASE_AMPLITUDE_G * gain
        if label is ConditionLabel.UNBALANCE and axis < 2:
            amplitude *= UNBALANCE_GAIN
        signal = amplitude * np.sin(rotation + phase)
        if label is ConditionLabel.MISALIGNMENT:
            signal = signal + MISALIGNMENT_AMPLITUDE_G * gain * np.sin(2 * rotation + phase)
        if label is ConditionLabel.BEARING_FAULT:
            signal = signal + gain * _impulse_train(t, config.rotation_hz)
        axes.append(signal)

    if config.noise_std > 0:
        axes = [axis + rng.normal(0.0, config.noise_std, n) for axis in axes]
    return VibrationRecord(time=t, x=axes[0], y=axes[1], z=axes[2],
                           missing=np.zeros(n, dtype=bool), label=label,
                           declared_rate_hz=config.sample_rate_hz)


def _impulse_train(t, rotation_hz):
    period = 1.0 / (BEARING_RATE_RATIO * rotation_hz)
    since_impact = np.mod(t, period)
    return (BEARING_AMPLITUDE_G * np.exp(-since_impact / BEARING_DECAY_S)
            * np.sin(2 * np.pi * BEARING_RING_HZ * since_impact))


def _write_record(task):
    config, label, index, path = task
    serialize_record(generate(config, label, index), path, float_format="%.6f")
    return path


def write_dataset(config, root_dir, n_jobs=1):
    """
    Write a dataset tree that scan_dataset reads back.

    One directory per condition, files <condition>_<index>.csv written with
    six decimals, and a manifest carrying the synthetic rate and duration.

    Returns:
    - List of written paths in scan order
    """
    config.validate()
    root = Path(root_dir)
    root.mkdir(parents=True, exist_ok=True)
    layout = DatasetLayout(directories={label: (label.key,) for label in ConditionLabel},
                           expected_rate_hz=config.sample_rate_hz,
                           expected_duration_s=config.duration_s)
    (root / MANIFEST_NAME).write_text(layout.to_text(), encoding="utf-8")

    tasks = []
    for label in ConditionLabel:
        (root / label.key).mkdir(exist_ok=True)
        tasks.extend((config, label, index, root / label.key / f"{label.key}_{index:05d}.csv")
                     for index in range(config.per_class_count))
    written = ordered_map(_write_record, tasks, n_jobs=n_jobs)
    logger.info(f"Wrote {len(written)} records ({config.per_class_count} per condition) to {root}")
    return sorted(written, key=str)
