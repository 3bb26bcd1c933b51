"""
One-sided magnitude spectra of triaxial vibration records
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from algorithms.fft import fft_rows
from core.errors import NonFiniteInput, TooShort

logger = logging.getLogger("Spectrum")

STANDARD_GRAVITY = 9.80665  # m/s^2 per g
SPECTRUM_COLUMNS = ["frequency_hz", "mag_x", "mag_y", "mag_z"]


@dataclass(frozen=True)
class Spectrum:
    """Per-axis |DFT| over bins 0..n_time//2, DC included"""
    magnitudes_x: np.ndarray
    magnitudes_y: np.ndarray
    magnitudes_z: np.ndarray
    bin_hz: float
    n_time: int

    def axes(self):
        return (self.magnitudes_x, self.magnitudes_y, self.magnitudes_z)

    @property
    def n_bins(self):
        return int(self.magnitudes_x.shape[0])

    def frequencies(self):
        return np.arange(self.n_bins) * self.bin_hz

    def bin_of(self, frequency_hz):
        """Nearest bin index for a frequency"""
        return int(round(frequency_hz / self.bin_hz))


def to_spectrum(record, unit_conversion=True, remove_dc=False):
    """
    Transform a record into its one-sided magnitude spectra.

    Parameters:
    - record: VibrationRecord; rows marked missing are dropped first
    - unit_conversion: Multiply samples by standard gravity (g -> m/s^2)
    - remove_dc: Subtract each axis' time-domain mean before transforming

    Returns:
    - Spectrum with bin_hz = sample_rate_hz / n_time

    Raises:
    - TooShort: If fewer than two usable rows remain
    """
    usable = record.usable()
    n_time = len(usable)
    if n_time < 2:
        raise TooShort(f"{record.source_path}: {n_time} usable rows, need at least 2")

    signals = usable.axes()
    if not np.all(np.isfinite(signals)):
        raise NonFiniteInput(f"{record.source_path}: non-finite samples after filtering")
    if unit_conversion:
        signals = signals * STANDARD_GRAVITY
    if remove_dc:
        signals = signals - signals.mean(axis=1, keepdims=True)

    one_sided = n_time // 2 + 1
    magnitudes = np.abs(fft_rows(signals)[:, :one_sided])
    bin_hz = usable.sample_rate_hz / n_time
    logger.debug(f"{record.source_path}: {n_time} samples, {one_sided} bins at {bin_hz:.4f} Hz")
    return Spectrum(magnitudes_x=magnitudes[0], magnitudes_y=magnitudes[1],
                    magnitudes_z=magnitudes[2], bin_hz=float(bin_hz), n_time=n_time)


def axis_bounds(spectrum):
    """Per-axis (min, max) magnitude, used for dataset-wide spectrum scaling"""
    return np.array([[axis.min(), axis.max()] for axis in spectrum.axes()])


def scale_spectrum(spectrum, bounds):
    """
    Min-max scale every axis with dataset-wide (min, max) bounds of shape (3, 2).

    Axes whose bounds coincide map to zero.
    """
    scaled = []
    for axis, (low, high) in zip(spectrum.axes(), np.asarray(bounds, dtype=np.float64)):
        span = high - low
        scaled.append(np.zeros_like(axis) if span <= 0 else (axis - low) / span)
    return Spectrum(magnitudes_x=scaled[0], magnitudes_y=scaled[1], magnitudes_z=scaled[2],
                    bin_hz=spectrum.bin_hz, n_time=spectrum.n_time)


def spectrum_frame(spectrum, max_hz=None):
    """Tabulate a spectrum as frequency_hz, mag_x, mag_y, mag_z"""
    frame = pd.DataFrame({
        "frequency_hz": spectrum.frequencies(),
        "mag_x": spectrum.magnitudes_x,
        "mag_y": spectrum.magnitudes_y,
        "mag_z": spectrum.magnitudes_z,
    }, columns=SPECTRUM_COLUMNS)
    if max_hz is not None:
        frame = frame[frame["frequency_hz"] <= max_hz]
    return frame


def write_spectrum_csv(spectrum, path, max_hz=None):
    spectrum_frame(spectrum, max_hz).to_csv(path, index=False, float_format="%.17g",
                                            lineterminator="\n")
    return path
