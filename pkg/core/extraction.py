"""
Dataset-to-feature-matrix stage: scan, parse, transform, describe, filter
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.condition import MANIFEST_NAME, DatasetLayout, load_manifest
from core.dataset import parse_record, scan_dataset
from core.features import SHAPE_PRINTED, FeatureMatrix, drop_missing, extract_features
from core.spectrum import axis_bounds, scale_spectrum, to_spectrum
from utils.parallel import ordered_map

logger = logging.getLogger("Extraction")


@dataclass(frozen=True)
class ExtractionOptions:
    unit_conversion: bool = True
    remove_dc: bool = False
    shape_factor: str = SHAPE_PRINTED
    spectrum_scaling: bool = False


def resolve_layout(root_dir, manifest_path=None):
    """Manifest given explicitly, else manifest.txt at the root, else defaults"""
    if manifest_path is not None:
        return load_manifest(manifest_path)
    candidate = Path(root_dir) / MANIFEST_NAME
    if candidate.is_file():
        return load_manifest(candidate)
    return DatasetLayout.default()


def _record_spectrum(path, label, layout, options):
    record = parse_record(path, label, expected_rate_hz=layout.expected_rate_hz,
                          expected_duration_s=layout.expected_duration_s)
    return to_spectrum(record, unit_conversion=options.unit_conversion,
                       remove_dc=options.remove_dc)


def _bounds_task(task):
    path, label, layout, options = task
    return axis_bounds(_record_spectrum(path, label, layout, options))


def _features_task(task):
    path, label, layout, options, bounds, source = task
    spectrum = _record_spectrum(path, label, layout, options)
    if bounds is not None:
        spectrum = scale_spectrum(spectrum, bounds)
    return extract_features(spectrum, label=label, source_path=source,
                            shape_factor=options.shape_factor)


def extract_dataset(root_dir, options=None, layout=None, n_jobs=1):
    """
    Turn a dataset tree into a missing-filtered feature matrix.

    With spectrum scaling, a first pass collects per-axis magnitude bounds
    over every record and a second pass extracts features from the scaled
    spectra.

    Returns:
    - (FeatureMatrix, dropped_count)
    """
    root = Path(root_dir)
    options = options or ExtractionOptions()
    layout = layout or resolve_layout(root)
    entries = scan_dataset(root, layout)

    bounds = None
    if options.spectrum_scaling:
        per_record = ordered_map(_bounds_task,
                                 [(path, label, layout, options) for path, label in entries],
                                 n_jobs=n_jobs)
        stacked = np.stack(per_record)
        bounds = np.column_stack([stacked[:, :, 0].min(axis=0), stacked[:, :, 1].max(axis=0)])
        logger.info("Collected dataset-wide spectrum bounds")

    tasks = [(path, label, layout, options, bounds, Path(path).relative_to(root).as_posix())
             for path, label in entries]
    vectors = ordered_map(_features_task, tasks, n_jobs=n_jobs)
    matrix, dropped = drop_missing(FeatureMatrix.from_vectors(vectors))
    logger.info(f"Extracted {len(matrix)} feature rows, dropped {dropped}")
    return matrix, dropped
