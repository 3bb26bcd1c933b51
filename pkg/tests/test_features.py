import math

import numpy as np
import pandas as pd
import pytest

from core.condition import ConditionLabel
from core.errors import AllRowsDropped, EmptyMatrix, InvalidConfig
from core.features import (
    FEATURE_COLUMNS, N_FEATURES, SHAPE_CONVENTIONAL, FeatureMatrix, axis_descriptors,
    class_summary, drop_missing, extract_features, normalize_minmax, read_feature_csv,
    write_feature_csv
)
from core.spectrum import Spectrum


def _descriptors_by_loop(bins):
    """Direct-summation reference for the nine descriptors"""
    n = len(bins)
    mean = math.fsum(bins) / n
    std = math.sqrt(math.fsum((b - mean) ** 2 for b in bins) / n)
    rms = math.sqrt(math.fsum(b * b for b in bins) / n)
    peak = max(bins)
    return [
        mean,
        std,
        rms,
        peak - min(bins),
        peak / mean,
        math.fsum(((b - mean) / std) ** 3 for b in bins) / n,
        math.fsum(((b - mean) / std) ** 4 for b in bins) / n,
        abs(peak) / rms,
        1.0 / mean,
    ]


def _spectrum(x, y=None, z=None):
    x = np.asarray(x, dtype=np.float64)
    y = x.copy() if y is None else np.asarray(y, dtype=np.float64)
    z = x.copy() if z is None else np.asarray(z, dtype=np.float64)
    return Spectrum(magnitudes_x=x, magnitudes_y=y, magnitudes_z=z, bin_hz=1.0,
                    n_time=2 * (x.shape[0] - 1))


def _matrix(values, labels=None):
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    labels = np.zeros(values.shape[0], dtype=np.int64) if labels is None else np.asarray(labels)
    return FeatureMatrix(values=values, labels=labels)


def test_two_point_arithmetic():
    values, issues = axis_descriptors([0.0, 4.0])
    mean, std, rms, pp, impulse, skew, kurt, crest, shape = values
    assert issues == ()
    assert mean == 2.0
    assert std == 2.0
    assert rms == pytest.approx(math.sqrt(8.0))
    assert pp == 4.0
    assert impulse == 2.0
    assert skew == pytest.approx(0.0, abs=1e-15)
    assert kurt == pytest.approx(1.0)
    assert crest == pytest.approx(1.414214, abs=1e-6)
    assert shape == 0.5


def test_constant_bins_flag_a_degenerate_signal():
    values, issues = axis_descriptors([2.0, 2.0, 2.0])
    assert values[0] == 2.0
    assert values[1] == 0.0
    assert np.isnan(values[5]) and np.isnan(values[6])
    assert issues == ("DegenerateSignal",)


def test_zero_bins_flag_zero_mean():
    values, issues = axis_descriptors([0.0, 0.0, 0.0, 0.0])
    assert "ZeroMean" in issues
    assert np.isnan(values[4]) and np.isnan(values[8])


def test_matches_direct_summation_on_random_spectra(rng):
    for _ in range(1000):
        n = int(rng.integers(8, 2049))
        bins = np.abs(rng.standard_normal(n)) * rng.uniform(0.1, 50.0)
        values, issues = axis_descriptors(bins)
        assert issues == ()
        assert values == pytest.approx(np.array(_descriptors_by_loop(bins.tolist())), rel=1e-12)


def test_conventional_shape_factor():
    bins = np.array([1.0, 2.0, 6.0])
    values, _ = axis_descriptors(bins, shape_factor=SHAPE_CONVENTIONAL)
    rms = math.sqrt((1 + 4 + 36) / 3)
    assert values[8] == pytest.approx(rms / 3.0)


def test_unknown_shape_factor_mode():
    with pytest.raises(InvalidConfig):
        axis_descriptors([1.0, 2.0], shape_factor="mystery")


def test_invariant_under_bin_permutation(rng):
    bins = np.abs(rng.standard_normal(257))
    shuffled = rng.permutation(bins)
    assert axis_descriptors(shuffled)[0] == pytest.approx(axis_descriptors(bins)[0], rel=1e-12)


def test_scaling_the_spectrum(rng):
    bins = np.abs(rng.standard_normal(300)) + 0.1
    alpha = 7.3
    base, _ = axis_descriptors(bins)
    scaled, _ = axis_descriptors(alpha * bins)
    assert scaled[:4] == pytest.approx(alpha * base[:4], rel=1e-10)
    assert scaled[4:8] == pytest.approx(base[4:8], rel=1e-10)
    assert scaled[8] == pytest.approx(base[8] / alpha, rel=1e-10)


def test_feature_vector_layout(rng):
    x, y, z = (np.abs(rng.standard_normal(33)) + shift for shift in (0.0, 10.0, 20.0))
    vector = extract_features(_spectrum(x, y, z), label=ConditionLabel.UNBALANCE)
    assert N_FEATURES == 27
    assert vector.values.shape == (27,)
    assert FEATURE_COLUMNS[:3] == ["mean_x", "std_x", "rms_x"]
    assert FEATURE_COLUMNS[9] == "mean_y"
    assert FEATURE_COLUMNS[-1] == "shape_z"
    assert vector.values[0] == pytest.approx(x.mean())
    assert vector.values[9] == pytest.approx(y.mean())
    assert vector.values[18] == pytest.approx(z.mean())
    assert vector.as_dict()["mean_z"] == pytest.approx(z.mean())
    assert not vector.is_filterable


def test_degenerate_axis_flags_the_vector():
    vector = extract_features(_spectrum([1.0, 2.0, 3.0], y=[4.0, 4.0, 4.0]))
    assert vector.issues == ("DegenerateSignal:y",)
    assert vector.is_filterable


def test_minmax_endpoints():
    result = normalize_minmax(_matrix([3.0, 7.0]))
    assert result.values[:, 0].tolist() == [0.0, 1.0]


def test_minmax_three_values():
    result = normalize_minmax(_matrix([1.0, 2.0, 4.0]))
    assert result.values[:, 0] == pytest.approx([0.0, 1.0 / 3.0, 1.0])


def test_minmax_constant_column_maps_to_zero():
    result = normalize_minmax(_matrix([5.0, 5.0, 5.0]))
    assert result.values[:, 0].tolist() == [0.0, 0.0, 0.0]
    assert result.scaling.constant_columns.tolist() == [True]


def test_minmax_needs_two_rows():
    with pytest.raises(EmptyMatrix):
        normalize_minmax(_matrix([1.0]))


def test_minmax_is_idempotent_and_bounded(rng):
    once = normalize_minmax(_matrix(rng.standard_normal((20, 27)) * 100))
    twice = normalize_minmax(once)
    assert np.array_equal(once.values, twice.values)
    assert once.values.min() >= 0.0 and once.values.max() <= 1.0
    assert once.is_normalized


def test_minmax_bounds_reapply_to_unseen_rows(rng):
    train = _matrix(rng.standard_normal((10, 4)))
    normalized = normalize_minmax(train)
    unseen = _matrix(train.values[:3])
    assert np.array_equal(normalized.scaling.apply(unseen).values, normalized.values[:3])


def test_drop_missing_counts_rows():
    values = np.arange(8, dtype=np.float64).reshape(4, 2)
    values[2, 1] = np.nan
    filtered, dropped = drop_missing(_matrix(values, labels=[0, 1, 2, 3]))
    assert dropped == 1
    assert filtered.labels.tolist() == [0, 1, 3]
    assert np.array_equal(filtered.values, values[[0, 1, 3]])


def test_drop_missing_identity():
    values = np.arange(6, dtype=np.float64).reshape(3, 2)
    filtered, dropped = drop_missing(_matrix(values))
    assert dropped == 0
    assert np.array_equal(filtered.values, values)


def test_drop_missing_known_corruption_mask(rng):
    values = rng.standard_normal((50, 27))
    corrupt = rng.choice(50, size=7, replace=False)
    values[corrupt, rng.integers(0, 27, size=7)] = np.inf
    values[corrupt[0], 0] = np.nan
    filtered, dropped = drop_missing(_matrix(values, labels=np.arange(50) % 4))
    keep = np.setdiff1d(np.arange(50), corrupt)
    assert dropped == 7
    assert np.array_equal(filtered.values, values[keep])


def test_drop_missing_removes_flagged_rows():
    vectors = [extract_features(_spectrum([1.0, 2.0, 3.0])),
               extract_features(_spectrum([1.0, 2.0, 3.0], z=[0.0, 0.0, 0.0]))]
    filtered, dropped = drop_missing(FeatureMatrix.from_vectors(vectors))
    assert dropped == 1
    assert len(filtered) == 1


def test_drop_missing_everything():
    with pytest.raises(AllRowsDropped):
        drop_missing(_matrix([[np.nan], [np.inf]]))


def test_feature_csv_contract(tmp_path, rng):
    matrix = FeatureMatrix(values=rng.standard_normal((5, 27)),
                           labels=np.array([0, 1, 2, 3, 0]),
                           sources=tuple(f"normal/r{i}.csv" for i in range(5)))
    path = write_feature_csv(matrix, tmp_path / "features.csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == ("label,source,mean_x,std_x,rms_x,pp_x,if_x,skew_x,kurt_x,crest_x,shape_x,"
                      "mean_y,std_y,rms_y,pp_y,if_y,skew_y,kurt_y,crest_y,shape_y,"
                      "mean_z,std_z,rms_z,pp_z,if_z,skew_z,kurt_z,crest_z,shape_z")
    restored = read_feature_csv(path)
    assert np.array_equal(restored.values, matrix.values)
    assert restored.labels.tolist() == [0, 1, 2, 3, 0]
    assert restored.sources == matrix.sources


def test_feature_csv_rejects_other_files(tmp_path):
    path = tmp_path / "other.csv"
    pd.DataFrame({"a": [1], "b": [2]}).to_csv(path, index=False)
    with pytest.raises(InvalidConfig):
        read_feature_csv(path)


def test_class_summary_layout(rng):
    values = rng.standard_normal((6, 27))
    matrix = FeatureMatrix(values=values, labels=np.array([0, 0, 0, 3, 3, 3]))
    summary = class_summary(matrix)
    assert list(summary.columns) == ["condition", "feature", "mean", "std"]
    assert len(summary) == 2 * 27
    row = summary[(summary["condition"] == "BearingFault") & (summary["feature"] == "kurt_y")]
    column = FEATURE_COLUMNS.index("kurt_y")
    assert row["mean"].iloc[0] == pytest.approx(values[3:, column].mean())
    assert row["std"].iloc[0] == pytest.approx(values[3:, column].std())
