"""
K-nearest-neighbor voting by brute-force Euclidean scan
"""
import numpy as np


def nearest_indices(reference, queries, k, chunk=64):
    """
    Indices of the k nearest reference rows for every query row.

    Parameters:
    - reference: Stored rows, shape (n, d)
    - queries: Query rows, shape (q, d)
    - k: Number of neighbors (1 <= k <= n)
    - chunk: Queries per distance block

    Returns:
    - int array of shape (q, k), nearest first; equal distances keep the
      earlier stored row first
    """
    reference = np.asarray(reference, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64)
    result = np.empty((queries.shape[0], k), dtype=np.int64)
    for start in range(0, queries.shape[0], chunk):
        block = queries[start:start + chunk]
        difference = block[:, None, :] - reference[None, :, :]
        distances = np.sum(difference * difference, axis=2)
        order = np.argsort(distances, axis=1, kind="stable")
        result[start:start + chunk] = order[:, :k]
    return result


def vote(neighbor_labels, n_classes):
    """
    Majority label per row of neighbor labels (codes 0..n_classes-1).

    Ties go to the lowest class code.
    """
    counts = np.zeros((neighbor_labels.shape[0], n_classes), dtype=np.int64)
    rows = np.repeat(np.arange(neighbor_labels.shape[0]), neighbor_labels.shape[1])
    np.add.at(counts, (rows, neighbor_labels.ravel()), 1)
    return np.argmax(counts, axis=1)


def knn_predict(reference, reference_labels, queries, k, n_classes):
    """Predict class indices for queries from the stored reference set"""
    neighbors = nearest_indices(reference, queries, k)
    return vote(np.asarray(reference_labels)[neighbors], n_classes)
