"""Binary metrics and precision-constrained threshold selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import clone
from sklearn.model_selection import StratifiedKFold

from ..errors import AlignmentError, InsufficientPositivesError


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def binary_prf(labels, predicted) -> PRF:
    """Precision/recall/F1 of 0/1 predictions; every 0/0 ratio is taken as 0."""
    labels = np.asarray(labels).astype(bool)
    predicted = np.asarray(predicted).astype(bool)
    if labels.shape != predicted.shape:
        raise AlignmentError(f"{labels.size} labels but {predicted.size} predictions")
    tp = int(np.sum(labels & predicted))
    n_pred, n_pos = int(predicted.sum()), int(labels.sum())
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_pos if n_pos else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return PRF(p, r, f)


def prf_at_threshold(scores, labels, threshold) -> PRF:
    """Metrics with the linking rule ``score > threshold``."""
    return binary_prf(labels, np.asarray(scores) > threshold)


def precision_recall_at_cutoffs(scores, labels):
    """Pooled precision and recall for every distinct score used as ``score >= cutoff``.

    Returns ``(cutoffs, precision, recall)`` with cutoffs ascending.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    cutoffs = np.unique(scores)
    order = np.argsort(-scores, kind="stable")
    s_desc, y_desc = scores[order], labels[order]
    tp_cum = np.cumsum(y_desc)
    # number of samples with score >= c is the position after the last equal score
    n_at = len(s_desc) - np.searchsorted(s_desc[::-1], cutoffs, side="left")
    tp = tp_cum[n_at - 1]
    n_pos = labels.sum()
    precision = tp / n_at
    recall = tp / n_pos if n_pos else np.zeros_like(precision)
    return cutoffs, precision, recall


def select_threshold(scores, labels, min_precision=0.9) -> float:
    """Pick the observed score that maximizes recall subject to precision >= min_precision.

    Samples with ``score >= cutoff`` count as predicted positive. If no
    cutoff reaches ``min_precision``, the cutoff with the highest precision
    is returned, preferring the higher cutoff on ties.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise AlignmentError(f"{scores.size} scores but {labels.size} labels")
    if scores.size == 0:
        raise InsufficientPositivesError("no scores to calibrate on")
    cutoffs, precision, recall = precision_recall_at_cutoffs(scores, labels)
    ok = precision >= min_precision
    if ok.any():
        best_recall = recall[ok].max()
        # equal-recall ties go to the higher cutoff, which has fewer false positives
        candidates = np.nonzero(ok & (recall == best_recall))[0]
        return float(cutoffs[candidates.max()])
    best = np.nonzero(precision == precision.max())[0]
    return float(cutoffs[best.max()])


def cross_val_scores(estimator, X, y, k=5, seed=0) -> np.ndarray:
    """Out-of-fold linking scores from stratified k-fold cross-validation."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if int(y.sum()) < k:
        raise InsufficientPositivesError(f"need at least {k} positive samples, got {int(y.sum())}")
    oof = np.empty(len(y))
    folds = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    for train_idx, test_idx in folds.split(X, y):
        model = clone(estimator).fit(X[train_idx], y[train_idx])
        oof[test_idx] = model.decision_scores(X[test_idx])
    return oof


def calibrate_threshold(estimator, X, y, k=5, min_precision=0.9, seed=0) -> float:
    """Cross-validated cutoff; positives are ``score >= cutoff``."""
    return select_threshold(cross_val_scores(estimator, X, y, k, seed), y, min_precision)


def strict_threshold(cutoff: float) -> float:
    """Convert an inclusive cutoff into the equivalent ``score > t`` threshold."""
    return float(np.nextafter(cutoff, -np.inf))
