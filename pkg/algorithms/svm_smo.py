"""
Sequential minimal optimization for the binary soft-margin SVM dual
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from core.errors import ConvergenceWarning

logger = logging.getLogger("SMO")

TAU = 1e-12
GAP_RATIO = 0.01
REFINE_RATIO = 1e-3


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    objective_history: list = field(default_factory=list)


def rbf_kernel(A, B, gamma):
    """k(u, v) = exp(-gamma * ||u - v||^2) for every row pair of A and B"""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    squared = (np.einsum("ij,ij->i", A, A)[:, None]
               + np.einsum("ij,ij->i", B, B)[None, :]
               - 2.0 * A @ B.T)
    np.maximum(squared, 0.0, out=squared)
    return np.exp(-gamma * squared)


def dual_objective(alpha, y, kernel):
    """W(alpha) = sum(alpha) - 1/2 * sum_ij alpha_i alpha_j y_i y_j K_ij"""
    weighted = alpha * y
    return float(alpha.sum() - 0.5 * weighted @ kernel @ weighted)


def solve_smo(kernel, y, C, tol=1e-3, max_passes=10000, track_objective=False):
    """
    Solve the SVM dual with maximal-violating-pair working set selection.

    Minimizes f(a) = 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij subject to
    0 <= a_i <= C and sum a_i y_i = 0, which maximizes the dual objective.

    Parameters:
    - kernel: Precomputed (n, n) kernel matrix
    - y: Labels in {-1, +1}
    - C: Box constraint
    - tol: KKT tolerance. The solver stops once the maximal violation m - M
      is below tol and the duality gap is below GAP_RATIO * tol * max(1, |W|),
      or once m - M falls below REFINE_RATIO * tol
    - max_passes: Iteration cap in units of n pair updates
    - track_objective: Record the dual objective after every update

    Returns:
    - SmoResult
    """
    K = np.asarray(kernel, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    alpha = np.zeros(n)
    gradient = -np.ones(n)
    diagonal = np.diag(K).copy()
    max_iter = max_passes * max(n, 1)
    history = [0.0] if track_objective else []
    positive = y > 0

    iterations = 0
    converged = False
    while iterations < max_iter:
        score = -y * gradient
        # I_up: alpha can move up along y; I_low: alpha can move down along y
        up = np.where(positive, alpha < C, alpha > 0)
        low = np.where(positive, alpha > 0, alpha < C)
        up_scores = np.where(up, score, -np.inf)
        low_scores = np.where(low, score, np.inf)
        i = int(np.argmax(up_scores))
        j = int(np.argmin(low_scores))
        m, M = up_scores[i], low_scores[j]
        if m - M < tol and (m - M < REFINE_RATIO * tol
                            or _duality_gap_met(alpha, y, gradient, C, tol)):
            converged = True
            break

        quad = diagonal[i] + diagonal[j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = TAU
        step = (m - M) / quad
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, room_i, room_j)

        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        # snap to the box so bound membership stays exact
        for index in (i, j):
            if alpha[index] < 1e-15 * C:
                alpha[index] = 0.0
            elif alpha[index] > C * (1 - 1e-15):
                alpha[index] = C
        gradient += y * step * (K[:, i] - K[:, j])
        iterations += 1
        if track_objective:
            history.append(float(-0.5 * np.dot(alpha, gradient - 1.0)))

    if not converged:
        message = f"SMO hit its iteration cap ({max_iter}) before reaching tolerance {tol}"
        logger.warning(message)
        warnings.warn(message, ConvergenceWarning)

    bias = _bias(alpha, y, gradient, C)
    return SmoResult(alpha=alpha, bias=bias, iterations=iterations,
                     converged=converged, objective_history=history)


def duality_gap(alpha, y, gradient, bias, C):
    """
    Primal minus dual objective for the primal point built from alpha and bias.

    With y_i f(x_i) = G_i + 1 + y_i b the hinge slack is max(0, -G_i - y_i b),
    so the gap reduces to alpha.G + C * sum(slack). It bounds how far the
    dual objective is from its optimum.
    """
    slack = np.maximum(0.0, -gradient - y * bias)
    return float(np.dot(alpha, gradient) + C * slack.sum())


def _duality_gap_met(alpha, y, gradient, C, tol):
    dual = 0.5 * alpha.sum() - 0.5 * np.dot(alpha, gradient)
    gap = duality_gap(alpha, y, gradient, _bias(alpha, y, gradient, C), C)
    return gap <= GAP_RATIO * tol * max(1.0, abs(dual))


def _bias(alpha, y, gradient, C):
    """b = -y_i G_i averaged over free vectors, else the middle of the feasible interval"""
    score = -y * gradient
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(score[free].mean())
    positive = y > 0
    up = np.where(positive, alpha < C, alpha > 0)
    low = np.where(positive, alpha > 0, alpha < C)
    m = score[up].max() if up.any() else score.max()
    M = score[low].min() if low.any() else score.min()
    return float((m + M) / 2.0)


def decision_function(support_vectors, coefficients, bias, gamma, X, chunk=512):
    """f(x) = sum_i alpha_i y_i k(x_i, x) + b for every row of X"""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], chunk):
        block = rbf_kernel(X[start:start + chunk], support_vectors, gamma)
        out[start:start + chunk] = block @ coefficients + bias
    return out
