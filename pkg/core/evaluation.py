"""
Stratified splits, cross-validated evaluation and hyperparameter sweeps
"""
import csv
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd

from core import classifier
from core.classifier import ClassifierKind, ClassifierSpec
from core.condition import ConditionLabel
from core.errors import ClassBelowFoldCount, EmptyGrid, InvalidConfig, TooFewRows
from core.features import fit_minmax
from utils.parallel import ordered_map
from utils.timer import Timer

logger = logging.getLogger("Evaluation")

N_CLASSES = len(ConditionLabel)
CURVE_COLUMNS = ["param", "train_accuracy", "eval_accuracy"]


class SplitMode(str, Enum):
    HOLDOUT = "holdout"
    KFOLD = "kfold"


@dataclass(frozen=True)
class SplitPlan:
    mode: SplitMode = SplitMode.KFOLD
    test_fraction: float = 0.2
    k: int = 5
    stratified: bool = True
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "mode", SplitMode(self.mode))
        if not 0 < self.test_fraction < 1:
            raise InvalidConfig(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.k < 2:
            raise InvalidConfig(f"k must be at least 2, got {self.k}")

    @classmethod
    def holdout(cls, test_fraction=0.2, seed=42, stratified=True):
        return cls(mode=SplitMode.HOLDOUT, test_fraction=test_fraction, seed=seed,
                   stratified=stratified)

    @classmethod
    def kfold(cls, k=5, seed=42, stratified=True):
        return cls(mode=SplitMode.KFOLD, k=k, seed=seed, stratified=stratified)

    @property
    def label(self):
        """Name used in reports: 1-fold for the holdout, <k>-fold otherwise"""
        return "1-fold" if self.mode is SplitMode.HOLDOUT else f"{self.k}-fold"


@dataclass
class EvalReport:
    spec: ClassifierSpec
    plan: SplitPlan
    confusion: np.ndarray
    fold_accuracies: list
    class_counts: np.ndarray = field(default=None)
    elapsed_s: float = 0.0

    def __post_init__(self):
        if self.class_counts is None:
            self.class_counts = self.confusion.sum(axis=1)

    @property
    def best_params(self):
        return self.spec

    @property
    def per_class_recall(self):
        """Recall per condition in percent; NaN for classes absent from the test data"""
        counts = self.confusion.sum(axis=1).astype(np.float64)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(counts > 0, 100.0 * np.diag(self.confusion) / counts, np.nan)

    @property
    def weighted_accuracy(self):
        """Mean of the per-class recalls over classes present in the test data"""
        return float(np.nanmean(self.per_class_recall))

    @property
    def accuracy(self):
        return float(100.0 * np.trace(self.confusion) / self.confusion.sum())

    @property
    def mean_fold_accuracy(self):
        return float(np.mean(self.fold_accuracies))


def make_splits(n_rows, labels, plan):
    """
    Build (train_indices, test_indices) pairs for a split plan.

    Holdout gives one pair; k-fold gives k pairs whose test folds partition
    the rows. Stratified splits shuffle each class with the plan's seed and
    deal it out so every fold is within one row of its class proportion.

    Raises:
    - TooFewRows: If there are too few rows for the plan
    - ClassBelowFoldCount: If a class has fewer rows than folds
    """
    labels = np.asarray(labels)
    if labels.shape[0] != n_rows:
        raise InvalidConfig(f"Got {labels.shape[0]} labels for {n_rows} rows")
    rng = np.random.default_rng(plan.seed)
    groups = _groups(labels, plan.stratified)

    if plan.mode is SplitMode.HOLDOUT:
        if n_rows < 2:
            raise TooFewRows(f"Holdout needs at least 2 rows, got {n_rows}")
        test = []
        for members in groups:
            shuffled = rng.permutation(members)
            test.extend(shuffled[:int(round(plan.test_fraction * shuffled.shape[0]))])
        test = np.sort(np.array(test, dtype=np.int64))
        train = np.setdiff1d(np.arange(n_rows), test)
        if test.shape[0] == 0 or train.shape[0] == 0:
            raise TooFewRows(f"Holdout of {n_rows} rows left an empty split")
        return [(train, test)]

    if n_rows < plan.k:
        raise TooFewRows(f"{plan.k}-fold split needs at least {plan.k} rows, got {n_rows}")
    if plan.stratified:
        for code, members in zip(np.unique(labels), groups):
            if members.shape[0] < plan.k:
                raise ClassBelowFoldCount(
                    f"Class {code} has {members.shape[0]} rows, fewer than {plan.k} folds")
    fold_of = np.empty(n_rows, dtype=np.int64)
    offset = 0
    for members in groups:
        shuffled = rng.permutation(members)
        fold_of[shuffled] = (offset + np.arange(shuffled.shape[0])) % plan.k
        offset += shuffled.shape[0]
    everything = np.arange(n_rows)
    return [(everything[fold_of != fold], everything[fold_of == fold]) for fold in range(plan.k)]


def _groups(labels, stratified):
    if not stratified:
        return [np.arange(labels.shape[0])]
    return [np.flatnonzero(labels == code) for code in np.unique(labels)]


def confusion_matrix(true_labels, predicted, n_classes=N_CLASSES):
    """Counts with rows = true condition, columns = predicted condition"""
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (np.asarray(true_labels), np.asarray(predicted)), 1)
    return matrix


def confusion_row_normalized(confusion):
    """Each row divided by its true-class total (rows of absent classes stay 0)"""
    totals = confusion.sum(axis=1, keepdims=True).astype(np.float64)
    return np.divide(confusion, totals, out=np.zeros(confusion.shape), where=totals > 0)


def _fold_data(data, train, test, strict_normalization):
    X_train, X_test = data.values[train], data.values[test]
    if strict_normalization:
        scaling = fit_minmax(X_train)
        X_train, X_test = scaling.transform(X_train), scaling.transform(X_test)
    return X_train, data.labels[train], X_test, data.labels[test]


def _accuracy(true_labels, predicted):
    return float(100.0 * np.mean(np.asarray(true_labels) == np.asarray(predicted)))


def evaluate(spec, data, plan, strict_normalization=False, splits=None):
    """
    Fit on every training split and score its test split.

    Parameters:
    - spec: ClassifierSpec
    - data: FeatureMatrix, normalized and missing-filtered unless
      strict_normalization rescales each fold from its training rows
    - plan: SplitPlan
    - splits: Precomputed splits (recomputed from the plan when None)

    Returns:
    - EvalReport with the confusion matrix summed over folds
    """
    timer = Timer().start()
    splits = splits if splits is not None else make_splits(len(data), data.labels, plan)
    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    fold_accuracies = []
    for fold, (train, test) in enumerate(splits):
        X_train, y_train, X_test, y_test = _fold_data(data, train, test, strict_normalization)
        model = classifier.fit(spec, X_train, y_train)
        predicted = classifier.predict(model, X_test)
        confusion += confusion_matrix(y_test, predicted)
        fold_accuracies.append(_accuracy(y_test, predicted))
        logger.info(f"{spec.describe()} fold {fold + 1}/{len(splits)}: {fold_accuracies[-1]:.3f}%")
    report = EvalReport(spec=spec, plan=plan, confusion=confusion,
                        fold_accuracies=fold_accuracies, elapsed_s=timer.stop())
    logger.info(f"{spec.describe()} {plan.label}: WA {report.weighted_accuracy:.3f}%")
    return report


def default_grid(kind, low=1, high=100, base=None):
    """
    Sweep grid for one classifier kind.

    SVM varies C over the integers low..high, KNN varies K over low..high and
    GNB varies the smoothing factor over 10^-low .. 10^-high.
    """
    kind = ClassifierKind(kind)
    if low < 1 or high < low:
        raise InvalidConfig(f"Grid range must satisfy 1 <= low <= high, got {low}..{high}")
    base = base or ClassifierSpec(kind=kind)
    if kind is ClassifierKind.GNB:
        return [base.with_parameter(10.0 ** -exponent) for exponent in range(low, high + 1)]
    return [base.with_parameter(value) for value in range(low, high + 1)]


def curve_parameter(spec):
    """Value plotted on the sweep axis: C, K, or the smoothing exponent"""
    if spec.kind is ClassifierKind.GNB:
        return float(-np.log10(spec.gnb_smoothing))
    return spec.parameter


def _score_grid_point(task):
    spec, data, folds, strict_normalization = task
    train_scores, eval_scores = [], []
    for train, test in folds:
        X_train, y_train, X_test, y_test = _fold_data(data, train, test, strict_normalization)
        model = classifier.fit(spec, X_train, y_train)
        train_scores.append(_accuracy(y_train, classifier.predict(model, X_train)))
        eval_scores.append(_accuracy(y_test, classifier.predict(model, X_test)))
    return float(np.mean(train_scores)), float(np.mean(eval_scores))


def grid_search(kind, grid, data, plan, strict_normalization=False, n_jobs=1):
    """
    Pick the grid point with the best held-out (or mean fold) accuracy.

    Ties go to the earliest grid point.

    Returns:
    - (best ClassifierSpec, curve as a list of (param, train_acc, eval_acc))

    Raises:
    - EmptyGrid: If the grid has no points
    """
    grid = list(grid)
    if not grid:
        raise EmptyGrid("Grid search needs at least one parameter setting")
    kind = ClassifierKind(kind)
    mismatched = [spec for spec in grid if spec.kind is not kind]
    if mismatched:
        raise InvalidConfig(f"Grid mixes kinds: expected {kind.value}, got {mismatched[0].kind.value}")

    folds = make_splits(len(data), data.labels, plan)
    scores = ordered_map(_score_grid_point,
                         [(spec, data, folds, strict_normalization) for spec in grid],
                         n_jobs=n_jobs)
    curve = [(curve_parameter(spec), train_acc, eval_acc)
             for spec, (train_acc, eval_acc) in zip(grid, scores)]
    best_index = int(np.argmax([eval_acc for _, _, eval_acc in curve]))
    best = grid[best_index]
    logger.info(f"Best {kind.value} on {plan.label}: {best.describe()} "
                f"({curve[best_index][2]:.3f}%)")
    return best, curve


def curve_frame(curve):
    return pd.DataFrame(curve, columns=CURVE_COLUMNS)


def write_curve_csv(curve, path):
    curve_frame(curve).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def write_report_csv(report, path):
    """
    Write an evaluation report as sectioned CSV rows.

    Sections: summary, params, fold accuracies, per-class recall, the count
    confusion matrix and its row-normalized form (true rows, predicted columns).
    """
    names = [label.display_name for label in ConditionLabel]
    normalized = confusion_row_normalized(report.confusion)
    spec = report.spec
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["section", "name"] + names)
        writer.writerow(["summary", "weighted_accuracy", f"{report.weighted_accuracy:.17g}"])
        writer.writerow(["summary", "accuracy", f"{report.accuracy:.17g}"])
        writer.writerow(["summary", "mean_fold_accuracy", f"{report.mean_fold_accuracy:.17g}"])
        writer.writerow(["summary", "mode", report.plan.label])
        writer.writerow(["summary", "seed", report.plan.seed])
        writer.writerow(["params", "classifier", spec.kind.value])
        writer.writerow(["params", "svm_c", f"{spec.svm_c:.17g}"])
        writer.writerow(["params", "svm_gamma", spec.svm_gamma if isinstance(spec.svm_gamma, str)
                         else f"{float(spec.svm_gamma):.17g}"])
        writer.writerow(["params", "knn_k", spec.knn_k])
        writer.writerow(["params", "gnb_smoothing", f"{spec.gnb_smoothing:.17g}"])
        for fold, accuracy in enumerate(report.fold_accuracies, start=1):
            writer.writerow(["fold_accuracy", fold, f"{accuracy:.17g}"])
        writer.writerow(["recall", "percent"] + [f"{value:.17g}" for value in report.per_class_recall])
        writer.writerow(["test_count", "rows"] + [int(value) for value in report.class_counts])
        for name, row in zip(names, report.confusion):
            writer.writerow(["confusion", name] + [int(value) for value in row])
        for name, row in zip(names, normalized):
            writer.writerow(["confusion_normalized", name] + [f"{value:.2f}" for value in row])
    return path


def format_confusion(report):
    """Text table of row-normalized recalls with two decimals"""
    names = [label.display_name for label in ConditionLabel]
    width = max(len(name) for name in names) + 2
    normalized = confusion_row_normalized(report.confusion)
    lines = [" " * width + "".join(name.rjust(width) for name in names)]
    for name, row in zip(names, normalized):
        lines.append(name.ljust(width) + "".join(f"{value:.2f}".rjust(width) for value in row))
    return "\n".join(lines)
