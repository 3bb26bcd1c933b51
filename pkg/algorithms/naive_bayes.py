"""
Gaussian naive Bayes with variance smoothing
"""
import numpy as np


def fit_gaussian_nb(X, class_index, n_classes, smoothing):
    """
    Estimate per-class priors, feature means and smoothed variances.

    The smoothing epsilon is ``smoothing`` times the largest pooled feature
    variance; when every column is constant the scale falls back to 1.

    Parameters:
    - X: Training rows, shape (n, d)
    - class_index: Class index 0..n_classes-1 for every row
    - n_classes: Number of classes
    - smoothing: Variance smoothing factor

    Returns:
    - (priors, means, variances) with shapes (c,), (c, d), (c, d)
    """
    X = np.asarray(X, dtype=np.float64)
    scale = float(np.var(X, axis=0).max())
    if scale <= 0:
        scale = 1.0
    epsilon = smoothing * scale

    n_features = X.shape[1]
    priors = np.empty(n_classes)
    means = np.empty((n_classes, n_features))
    variances = np.empty((n_classes, n_features))
    for c in range(n_classes):
        rows = X[class_index == c]
        priors[c] = rows.shape[0] / X.shape[0]
        means[c] = rows.mean(axis=0)
        variances[c] = rows.var(axis=0) + epsilon
    return priors, means, variances


def joint_log_likelihood(X, priors, means, variances):
    """log P(c) + sum_f log N(x_f; mu_cf, var_cf) for every row and class"""
    X = np.asarray(X, dtype=np.float64)
    scores = np.empty((X.shape[0], priors.shape[0]))
    for c in range(priors.shape[0]):
        normalizer = -0.5 * np.sum(np.log(2.0 * np.pi * variances[c]))
        squared = np.sum((X - means[c]) ** 2 / variances[c], axis=1)
        scores[:, c] = np.log(priors[c]) + normalizer - 0.5 * squared
    return scores


def log_posterior(X, priors, means, variances):
    """Normalized log P(c | x)"""
    scores = joint_log_likelihood(X, priors, means, variances)
    return scores - np.logaddexp.reduce(scores, axis=1, keepdims=True)
