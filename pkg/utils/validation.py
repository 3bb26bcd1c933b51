"""
Validation utilities shared by the signal and classifier modules
"""
import numpy as np

from core.errors import DimensionMismatch, NonFiniteInput


def validate_signal(signal):
    """
    Validate a 1-D real signal for the Fourier transforms.

    Parameters:
    - signal: Sequence of real numbers

    Returns:
    - float64 numpy array

    Raises:
    - NonFiniteInput: If the signal is empty, not 1-D, or holds NaN/inf
    """
    values = np.asarray(signal, dtype=np.float64)
    if values.ndim != 1:
        raise NonFiniteInput(f"Signal must be one-dimensional, got shape {values.shape}")
    if values.size == 0:
        raise NonFiniteInput("Signal must contain at least one sample")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("Signal contains NaN or infinite samples")
    return values


def validate_rows(X, n_features=None):
    """
    Validate a 2-D matrix of feature rows.

    Parameters:
    - X: Array-like of shape (n_rows, n_features)
    - n_features: Expected column count, or None to accept any

    Returns:
    - float64 numpy array of shape (n_rows, n_features)

    Raises:
    - DimensionMismatch: If the shape is wrong
    - NonFiniteInput: If any value is NaN or infinite
    """
    rows = np.asarray(X, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.ndim != 2:
        raise DimensionMismatch(f"Expected a 2-D row matrix, got shape {rows.shape}")
    if n_features is not None and rows.shape[1] != n_features:
        raise DimensionMismatch(
            f"Rows have {rows.shape[1]} features, model was trained on {n_features}")
    if not np.all(np.isfinite(rows)):
        raise NonFiniteInput("Feature rows contain NaN or infinite values")
    return rows


def validate_labels(y, n_rows):
    """Validate integer class labels aligned with n_rows feature rows"""
    labels = np.asarray(y)
    if labels.ndim != 1 or labels.shape[0] != n_rows:
        raise DimensionMismatch(f"Expected {n_rows} labels, got shape {labels.shape}")
    return labels.astype(np.int64)
