"""Test-set metrics: accuracy, negative log-likelihood (base 2) and frequency-weighted one-vs-rest AUROC."""

from __future__ import annotations

import logging

import numpy as np

__all__ = ["NLL_FLOOR", "midranks", "metric_accuracy", "metric_nll", "binary_auc", "metric_auroc", "METRICS"]

log = logging.getLogger(__name__)

NLL_FLOOR = 1e-16


def _check(y, proba):
    y = np.asarray(y, dtype=np.int64)
    proba = np.asarray(proba, dtype=np.float64)
    if proba.ndim != 2 or proba.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("need one distribution row per true label, and at least one prediction")
    return y, proba


def midranks(values) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the ranks they span."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    ranks = np.empty(v.shape[0])
    i = 0
    while i < sv.shape[0]:
        j = i
        while j + 1 < sv.shape[0] and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def metric_accuracy(y, proba) -> float:
    """Fraction of cases whose most probable class (lowest index on ties) is the true one."""
    y, proba = _check(y, proba)
    return float(np.mean(np.argmax(proba, axis=1) == y))


def metric_nll(y, proba) -> float:
    """Mean ``-log2`` probability of the true class, probabilities clamped to ``[1e-16, 1]``."""
    y, proba = _check(y, proba)
    p = np.clip(proba[np.arange(y.shape[0]), y], NLL_FLOOR, 1.0)
    return float(-np.mean(np.log2(p)))


def binary_auc(scores, positive) -> float:
    """Area under the ROC curve via the Mann-Whitney statistic with midranks."""
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = positive.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative cases")
    r = midranks(scores)
    return float((r[positive].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def metric_auroc(y, proba) -> float:
    """One-vs-rest AUC per class, averaged with weights equal to the class frequencies.

    Classes absent from ``y`` are skipped (the remaining weights are
    renormalised). With a single class present the result is NaN.
    """
    y, proba = _check(y, proba)
    total, weight = 0.0, 0.0
    for c in range(proba.shape[1]):
        pos = y == c
        k = int(pos.sum())
        if k == 0:
            log.info("class %d absent from the test labels; its AUROC term is skipped", c)
            continue
        if k == y.shape[0]:
            continue
        total += k * binary_auc(proba[:, c], pos)
        weight += k
    return total / weight if weight > 0 else float("nan")


# name -> (function, higher is better)
METRICS = {
    "accuracy": (metric_accuracy, True),
    "nll": (metric_nll, False),
    "auroc": (metric_auroc, True),
}
