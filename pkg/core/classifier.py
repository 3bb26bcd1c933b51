"""
Classifier settings, trained models and the shared fit/predict contract
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations
from pathlib import Path

import numpy as np

from algorithms.naive_bayes import fit_gaussian_nb, joint_log_likelihood, log_posterior
from algorithms.nearest_neighbor import knn_predict
from algorithms.svm_smo import decision_function, rbf_kernel, solve_smo
from core.errors import (
    InvalidConfig, KTooLarge, ModelFormatError, SingleClass, WrongModelKind
)
from core.features import MinMaxScaling
from utils.validation import validate_labels, validate_rows

logger = logging.getLogger("Classifier")

GAMMA_AUTO = "auto"
MODEL_MAGIC = "vibrodiag-model"
MODEL_VERSION = "v1"


class ClassifierKind(str, Enum):
    SVM = "svm"
    KNN = "knn"
    GNB = "gnb"


@dataclass(frozen=True)
class ClassifierSpec:
    kind: ClassifierKind
    svm_c: float = 1.0
    svm_gamma: object = GAMMA_AUTO
    knn_k: int = 5
    gnb_smoothing: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassifierKind(self.kind))
        if self.svm_c <= 0:
            raise InvalidConfig(f"svm_c must be positive, got {self.svm_c}")
        if self.svm_gamma != GAMMA_AUTO and not float(self.svm_gamma) > 0:
            raise InvalidConfig(f"svm_gamma must be positive or 'auto', got {self.svm_gamma}")
        if int(self.knn_k) < 1:
            raise InvalidConfig(f"knn_k must be at least 1, got {self.knn_k}")
        if not 0 < self.gnb_smoothing <= 1:
            raise InvalidConfig(f"gnb_smoothing must be in (0, 1], got {self.gnb_smoothing}")

    @property
    def parameter(self):
        """The hyperparameter a sweep varies for this kind"""
        if self.kind is ClassifierKind.SVM:
            return self.svm_c
        if self.kind is ClassifierKind.KNN:
            return self.knn_k
        return self.gnb_smoothing

    def describe(self):
        if self.kind is ClassifierKind.SVM:
            return f"svm C={self.svm_c:g} gamma={self.svm_gamma}"
        if self.kind is ClassifierKind.KNN:
            return f"knn K={self.knn_k}"
        return f"gnb var_smoothing={self.gnb_smoothing:g}"

    def with_parameter(self, value):
        if self.kind is ClassifierKind.SVM:
            return replace(self, svm_c=float(value))
        if self.kind is ClassifierKind.KNN:
            return replace(self, knn_k=int(value))
        return replace(self, gnb_smoothing=float(value))


@dataclass(frozen=True)
class SvmPair:
    """Binary machine for classes (positive, negative); +1 is the lower class code"""
    positive: int
    negative: int
    support_vectors: np.ndarray
    alphas: np.ndarray
    signs: np.ndarray
    bias: float
    iterations: int = 0

    @property
    def coefficients(self):
        return self.alphas * self.signs


@dataclass(frozen=True)
class SvmModel:
    classes: np.ndarray
    pairs: tuple
    gamma: float
    c: float
    n_features: int
    kind = ClassifierKind.SVM


@dataclass(frozen=True)
class KnnModel:
    classes: np.ndarray
    rows: np.ndarray
    labels: np.ndarray
    k: int
    n_features: int
    kind = ClassifierKind.KNN


@dataclass(frozen=True)
class GnbModel:
    classes: np.ndarray
    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    n_features: int
    kind = ClassifierKind.GNB


def default_gamma(X):
    """1 / (d * Var(X)) over all training values pooled"""
    variance = float(np.var(X))
    if variance <= 0:
        return 1.0
    return 1.0 / (X.shape[1] * variance)


def fit(spec, X, y):
    """
    Train the classifier described by ``spec``.

    Parameters:
    - spec: ClassifierSpec
    - X: Normalized feature rows, shape (n, d)
    - y: Integer class codes, length n

    Returns:
    - SvmModel, KnnModel or GnbModel

    Raises:
    - SingleClass: If fewer than two classes are present
    - NonFiniteInput: If any row holds NaN/inf
    - KTooLarge: If knn_k exceeds the number of rows
    """
    rows = validate_rows(X)
    labels = validate_labels(y, rows.shape[0])
    classes = np.unique(labels)
    if classes.shape[0] < 2:
        raise SingleClass(f"Training needs at least 2 classes, got {classes.tolist()}")
    class_index = np.searchsorted(classes, labels)

    if spec.kind is ClassifierKind.SVM:
        return _fit_svm(spec, rows, class_index, classes)
    if spec.kind is ClassifierKind.KNN:
        if spec.knn_k > rows.shape[0]:
            raise KTooLarge(f"K={spec.knn_k} exceeds {rows.shape[0]} training rows")
        return KnnModel(classes=classes, rows=rows.copy(), labels=class_index,
                        k=int(spec.knn_k), n_features=rows.shape[1])
    priors, means, variances = fit_gaussian_nb(rows, class_index, classes.shape[0],
                                               spec.gnb_smoothing)
    return GnbModel(classes=classes, priors=priors, means=means, variances=variances,
                    n_features=rows.shape[1])


def _fit_svm(spec, rows, class_index, classes):
    gamma = default_gamma(rows) if spec.svm_gamma == GAMMA_AUTO else float(spec.svm_gamma)
    pairs = []
    for a, b in combinations(range(classes.shape[0]), 2):
        mask = (class_index == a) | (class_index == b)
        pair_rows = rows[mask]
        signs = np.where(class_index[mask] == a, 1.0, -1.0)
        kernel = rbf_kernel(pair_rows, pair_rows, gamma)
        result = solve_smo(kernel, signs, spec.svm_c)
        support = result.alpha > 0
        pairs.append(SvmPair(positive=a, negative=b, support_vectors=pair_rows[support],
                             alphas=result.alpha[support], signs=signs[support],
                             bias=result.bias, iterations=result.iterations))
        logger.debug(f"Pair {classes[a]}/{classes[b]}: {int(support.sum())} support vectors, "
                     f"{result.iterations} iterations")
    logger.info(f"Trained {len(pairs)} pairwise machines (C={spec.svm_c:g}, gamma={gamma:.6g})")
    return SvmModel(classes=classes, pairs=tuple(pairs), gamma=gamma, c=float(spec.svm_c),
                    n_features=rows.shape[1])


def decision_values(model, X):
    """
    Raw pairwise decision values, shape (n_rows, n_pairs).

    Positive values favour the pair's lower class code.

    Raises:
    - WrongModelKind: If the model is not an SVM
    """
    if not isinstance(model, SvmModel):
        raise WrongModelKind(f"decision_values needs an SVM model, got {model.kind.value}")
    rows = validate_rows(X, model.n_features)
    return np.column_stack([
        decision_function(pair.support_vectors, pair.coefficients, pair.bias, model.gamma, rows)
        for pair in model.pairs
    ])


def predict(model, X):
    """
    Predict class codes for feature rows.

    Raises:
    - DimensionMismatch: If the row width differs from training
    """
    rows = validate_rows(X, model.n_features)
    if isinstance(model, SvmModel):
        index = _vote_pairs(model, decision_values(model, rows))
    elif isinstance(model, KnnModel):
        index = knn_predict(model.rows, model.labels, rows, model.k, model.classes.shape[0])
    else:
        scores = joint_log_likelihood(rows, model.priors, model.means, model.variances)
        index = np.argmax(scores, axis=1)
    return model.classes[index]


def _vote_pairs(model, values):
    """One-vs-one votes; ties by summed decision magnitude, then lowest class code"""
    n_classes = model.classes.shape[0]
    votes = np.zeros((values.shape[0], n_classes))
    confidence = np.zeros((values.shape[0], n_classes))
    for column, pair in enumerate(model.pairs):
        value = values[:, column]
        positive_wins = value > 0
        votes[:, pair.positive] += positive_wins
        votes[:, pair.negative] += ~positive_wins
        confidence[:, pair.positive] += value
        confidence[:, pair.negative] -= value
    result = np.empty(values.shape[0], dtype=np.int64)
    for row in range(values.shape[0]):
        tied = np.flatnonzero(votes[row] == votes[row].max())
        if tied.shape[0] > 1:
            best = confidence[row, tied].max()
            tied = tied[confidence[row, tied] == best]
        result[row] = tied[0]
    return result


def predict_log_posterior(model, X):
    """Normalized class log posteriors of a GNB model, columns in model.classes order"""
    if not isinstance(model, GnbModel):
        raise WrongModelKind(f"Posteriors need a GNB model, got {model.kind.value}")
    rows = validate_rows(X, model.n_features)
    return log_posterior(rows, model.priors, model.means, model.variances)


def _numbers(values):
    return " ".join(f"{float(value):.17g}" for value in np.ravel(values))


def _integers(values):
    return " ".join(str(int(value)) for value in np.ravel(values))


def save_model(path, model, scaling=None):
    """
    Write a model as a versioned plain-text file.

    The header line is ``vibrodiag-model v1 <kind>``; numbers are written with
    17 significant digits so they read back bit for bit.
    """
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION} {model.kind.value}",
             f"classes {_integers(model.classes)}",
             f"n_features {model.n_features}"]
    if scaling is None:
        lines.append("scaling none")
    else:
        lines += ["scaling minmax", f"min {_numbers(scaling.mins)}", f"max {_numbers(scaling.maxs)}"]

    if isinstance(model, SvmModel):
        lines += [f"gamma {model.gamma:.17g}", f"c {model.c:.17g}", f"pairs {len(model.pairs)}"]
        for pair in model.pairs:
            lines.append(f"pair {pair.positive} {pair.negative} {pair.support_vectors.shape[0]} "
                         f"{pair.bias:.17g} {pair.iterations}")
            for vector, alpha, sign in zip(pair.support_vectors, pair.alphas, pair.signs):
                lines.append(f"sv {alpha:.17g} {int(sign)} {_numbers(vector)}")
    elif isinstance(model, KnnModel):
        lines += [f"k {model.k}", f"rows {model.rows.shape[0]}"]
        for row, label in zip(model.rows, model.labels):
            lines.append(f"row {int(label)} {_numbers(row)}")
    else:
        lines.append(f"priors {_numbers(model.priors)}")
        for mean, variance in zip(model.means, model.variances):
            lines.append(f"mean {_numbers(mean)}")
            lines.append(f"var {_numbers(variance)}")

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_model(path):
    """
    Read a model file written by save_model.

    Returns:
    - (model, MinMaxScaling or None)

    Raises:
    - ModelFormatError: On a bad header, version or payload
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    try:
        magic, version, kind = lines[0].split()
    except (IndexError, ValueError):
        raise ModelFormatError(f"{path} has no model header")
    if magic != MODEL_MAGIC or version != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported model header {lines[0]!r}")
    try:
        return _parse_model(ClassifierKind(kind), iter(lines[1:]))
    except (StopIteration, ValueError, IndexError) as exc:
        raise ModelFormatError(f"{path}: malformed payload ({exc})")


def _field(lines, name):
    parts = next(lines).split()
    if parts[0] != name:
        raise ValueError(f"expected {name!r}, found {parts[0]!r}")
    return parts[1:]


def _floats(parts):
    return np.array([float(value) for value in parts], dtype=np.float64)


def _parse_model(kind, lines):
    classes = np.array([int(value) for value in _field(lines, "classes")], dtype=np.int64)
    n_features = int(_field(lines, "n_features")[0])
    scaling = None
    if _field(lines, "scaling")[0] == "minmax":
        scaling = MinMaxScaling(mins=_floats(_field(lines, "min")),
                                maxs=_floats(_field(lines, "max")))

    if kind is ClassifierKind.SVM:
        gamma = float(_field(lines, "gamma")[0])
        c = float(_field(lines, "c")[0])
        pairs = []
        for _ in range(int(_field(lines, "pairs")[0])):
            positive, negative, count, bias, iterations = _field(lines, "pair")
            vectors, alphas, signs = [], [], []
            for _ in range(int(count)):
                parts = _field(lines, "sv")
                alphas.append(float(parts[0]))
                signs.append(float(parts[1]))
                vectors.append(_floats(parts[2:]))
            pairs.append(SvmPair(
                positive=int(positive), negative=int(negative),
                support_vectors=np.array(vectors).reshape(int(count), n_features),
                alphas=np.array(alphas), signs=np.array(signs), bias=float(bias),
                iterations=int(iterations)))
        model = SvmModel(classes=classes, pairs=tuple(pairs), gamma=gamma, c=c,
                         n_features=n_features)
    elif kind is ClassifierKind.KNN:
        k = int(_field(lines, "k")[0])
        count = int(_field(lines, "rows")[0])
        rows, labels = [], []
        for _ in range(count):
            parts = _field(lines, "row")
            labels.append(int(parts[0]))
            rows.append(_floats(parts[1:]))
        model = KnnModel(classes=classes, rows=np.array(rows).reshape(count, n_features),
                         labels=np.array(labels, dtype=np.int64), k=k, n_features=n_features)
    else:
        priors = _floats(_field(lines, "priors"))
        means, variances = [], []
        for _ in range(classes.shape[0]):
            means.append(_floats(_field(lines, "mean")))
            variances.append(_floats(_field(lines, "var")))
        model = GnbModel(classes=classes, priors=priors, means=np.array(means),
                         variances=np.array(variances), n_features=n_features)
    return model, scaling
