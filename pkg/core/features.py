"""
Statistical descriptors of magnitude spectra, min-max scaling and NaN filtering
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from core.condition import ConditionLabel
from core.errors import AllRowsDropped, DegenerateSignal, EmptyMatrix, InvalidConfig, ZeroMean

logger = logging.getLogger("Features")

DESCRIPTORS = ("mean", "std", "rms", "peak_to_peak", "impulse_factor",
               "skewness", "kurtosis", "crest_factor", "shape_factor")
SHORT_NAMES = ("mean", "std", "rms", "pp", "if", "skew", "kurt", "crest", "shape")
AXES = ("x", "y", "z")
FEATURE_COLUMNS = [f"{name}_{axis}" for axis in AXES for name in SHORT_NAMES]
N_FEATURES = len(FEATURE_COLUMNS)
SIGMA_FLOOR = 1e-12

SHAPE_PRINTED = "printed"
SHAPE_CONVENTIONAL = "conventional"


@dataclass(frozen=True)
class FeatureVector:
    """27 descriptors ordered descriptor-major within axis x, then y, then z"""
    values: np.ndarray
    label: ConditionLabel
    source_path: str = ""
    issues: tuple = ()

    @property
    def is_filterable(self):
        return bool(self.issues) or not np.all(np.isfinite(self.values))

    def as_dict(self):
        return dict(zip(FEATURE_COLUMNS, (float(v) for v in self.values)))


def axis_descriptors(bins, shape_factor=SHAPE_PRINTED):
    """
    Compute the nine descriptors of one axis' magnitude bins.

    Population (1/N) divisors throughout. Undefined values come back as NaN
    together with the names of the errors that made them undefined.

    Returns:
    - (array of 9 floats, tuple of issue names)
    """
    x = np.asarray(bins, dtype=np.float64)
    n = x.shape[0]
    mean = x.sum() / n
    centered = x - mean
    variance = np.dot(centered, centered) / n
    std = np.sqrt(variance)
    rms = np.sqrt(np.dot(x, x) / n)
    x_max = x.max()
    peak_to_peak = x_max - x.min()
    issues = []

    if std < SIGMA_FLOOR:
        skewness = kurtosis = np.nan
        issues.append(DegenerateSignal.__name__)
    else:
        skewness = np.sum(centered ** 3) / n / std ** 3
        kurtosis = np.sum(centered ** 4) / n / std ** 4

    if mean == 0:
        impulse = np.nan
        issues.append(ZeroMean.__name__)
    else:
        impulse = x_max / mean

    crest = abs(x_max) / rms if rms > 0 else np.nan

    if shape_factor == SHAPE_PRINTED:
        shape = 1.0 / mean if mean != 0 else np.nan
    elif shape_factor == SHAPE_CONVENTIONAL:
        mean_abs = np.abs(x).sum() / n
        shape = rms / mean_abs if mean_abs > 0 else np.nan
    else:
        raise InvalidConfig(f"Unknown shape factor mode: {shape_factor!r}")

    values = np.array([mean, std, rms, peak_to_peak, impulse,
                       skewness, kurtosis, crest, shape], dtype=np.float64)
    return values, tuple(issues)


def extract_features(spectrum, label=ConditionLabel.NORMAL, source_path="",
                     shape_factor=SHAPE_PRINTED):
    """
    Reduce a spectrum to its 27-dim feature vector.

    Degenerate axes (zero variance, zero mean) do not raise: the vector is
    returned with NaN in the undefined slots and flagged for drop_missing.
    """
    values = []
    issues = []
    for axis_name, bins in zip(AXES, spectrum.axes()):
        axis_values, axis_issues = axis_descriptors(bins, shape_factor)
        values.append(axis_values)
        issues.extend(f"{issue}:{axis_name}" for issue in axis_issues)
    if issues:
        logger.debug(f"{source_path or 'spectrum'} flagged: {', '.join(issues)}")
    return FeatureVector(values=np.concatenate(values), label=ConditionLabel(label),
                         source_path=source_path, issues=tuple(issues))


@dataclass(frozen=True)
class MinMaxScaling:
    """Per-column bounds from x_norm = (x - x_min) / (x_max - x_min)"""
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def constant_columns(self):
        return self.maxs == self.mins

    def transform(self, values):
        values = np.asarray(values, dtype=np.float64)
        span = self.maxs - self.mins
        constant = self.constant_columns
        safe_span = np.where(constant, 1.0, span)
        scaled = (values - self.mins) / safe_span
        scaled[..., constant] = 0.0
        return scaled

    def apply(self, matrix):
        """Re-apply these bounds to another matrix (values may leave [0, 1])"""
        return replace(matrix, values=self.transform(matrix.values), scaling=self)


@dataclass(frozen=True)
class FeatureMatrix:
    """
    Row-major feature rows with their labels and provenance.

    ``scaling`` is None for raw features and holds the MinMaxScaling once
    normalized.
    """
    values: np.ndarray
    labels: np.ndarray
    sources: tuple = ()
    filterable: np.ndarray = None
    scaling: MinMaxScaling = None
    columns: tuple = field(default=tuple(FEATURE_COLUMNS))

    def __post_init__(self):
        if self.filterable is None:
            object.__setattr__(self, "filterable", np.zeros(self.values.shape[0], dtype=bool))
        if not self.sources:
            object.__setattr__(self, "sources", ("",) * self.values.shape[0])

    @classmethod
    def from_vectors(cls, vectors):
        vectors = list(vectors)
        if not vectors:
            return cls(values=np.empty((0, N_FEATURES)), labels=np.empty(0, dtype=np.int64))
        return cls(
            values=np.vstack([vector.values for vector in vectors]),
            labels=np.array([int(vector.label) for vector in vectors], dtype=np.int64),
            sources=tuple(vector.source_path for vector in vectors),
            filterable=np.array([bool(vector.issues) for vector in vectors], dtype=bool),
        )

    def __len__(self):
        return int(self.values.shape[0])

    @property
    def rows(self):
        return [FeatureVector(values=self.values[i], label=ConditionLabel(int(self.labels[i])),
                              source_path=self.sources[i])
                for i in range(len(self))]

    @property
    def is_normalized(self):
        return self.scaling is not None

    def take(self, indices):
        """Subset of rows in the given order"""
        indices = np.asarray(indices, dtype=np.int64)
        return replace(self, values=self.values[indices], labels=self.labels[indices],
                       sources=tuple(self.sources[i] for i in indices),
                       filterable=self.filterable[indices])


def fit_minmax(values):
    values = np.asarray(values, dtype=np.float64)
    return MinMaxScaling(mins=values.min(axis=0), maxs=values.max(axis=0))


def normalize_minmax(matrix):
    """
    Scale each feature column to [0, 1] over the whole matrix.

    Constant columns map to 0. The (min, max) pairs are kept on the result so
    the same scaling can be applied to unseen rows.

    Raises:
    - EmptyMatrix: If the matrix has fewer than two rows
    """
    if len(matrix) < 2:
        raise EmptyMatrix(f"Normalization needs at least 2 rows, got {len(matrix)}")
    scaling = fit_minmax(matrix.values)
    constant = int(np.count_nonzero(scaling.constant_columns))
    if constant:
        logger.info(f"{constant} constant feature columns mapped to 0")
    return scaling.apply(matrix)


def drop_missing(matrix):
    """
    Remove rows holding a non-finite or flagged value, keeping row order.

    Returns:
    - (filtered FeatureMatrix, dropped_count)

    Raises:
    - AllRowsDropped: If no row survives
    """
    bad = matrix.filterable | ~np.all(np.isfinite(matrix.values), axis=1)
    dropped = int(np.count_nonzero(bad))
    if dropped == len(matrix):
        raise AllRowsDropped(f"All {dropped} feature rows contain missing values")
    if dropped:
        logger.warning(f"Dropped {dropped} feature rows with missing values")
    return matrix.take(np.flatnonzero(~bad)), dropped


def write_feature_csv(matrix, path):
    """Write the label,source,<27 features> contract file"""
    frame = pd.DataFrame(matrix.values, columns=list(FEATURE_COLUMNS))
    frame.insert(0, "source", list(matrix.sources))
    frame.insert(0, "label", matrix.labels.astype(np.int64))
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def read_feature_csv(path):
    frame = pd.read_csv(path, keep_default_na=True, dtype={"source": str},
                        float_precision="round_trip")
    expected = ["label", "source"] + list(FEATURE_COLUMNS)
    if list(frame.columns) != expected:
        raise InvalidConfig(f"{path} is not a feature CSV (expected columns {','.join(expected[:4])},...)")
    labels = frame["label"].to_numpy(dtype=np.int64)
    unknown = sorted(set(labels.tolist()) - {int(label) for label in ConditionLabel})
    if unknown:
        raise InvalidConfig(f"{path} has unknown condition codes: {unknown}")
    return FeatureMatrix(
        values=frame[list(FEATURE_COLUMNS)].to_numpy(dtype=np.float64),
        labels=labels,
        sources=tuple(frame["source"].fillna("").astype(str)),
    )


def class_summary(matrix):
    """Per-class mean and std of every feature, long format"""
    frame = pd.DataFrame(matrix.values, columns=list(FEATURE_COLUMNS))
    frame["condition"] = [ConditionLabel(int(code)).display_name for code in matrix.labels]
    long = frame.melt(id_vars="condition", var_name="feature", value_name="value")
    summary = long.groupby(["condition", "feature"], sort=False)["value"].agg(
        mean="mean", std=lambda values: float(np.std(values)))
    return summary.reset_index()
