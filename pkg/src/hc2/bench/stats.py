"""Multi-classifier comparison: Wilcoxon signed-rank tests, Holm correction, average ranks and cliques."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from hc2.bench.metrics import midranks

__all__ = [
    "EXACT_LIMIT",
    "HOLM_LEVEL",
    "signed_rank_statistic",
    "wilcoxon_signed_rank",
    "holm",
    "average_ranks",
    "Comparison",
    "rank_and_clique",
]

EXACT_LIMIT = 20
HOLM_LEVEL = 0.05


def signed_rank_statistic(a, b) -> tuple[float, np.ndarray]:
    """``W+`` (sum of midranks of positive differences) and the non-zero ``|a - b|`` ranks."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    d = d[d != 0]
    r = midranks(np.abs(d))
    return float(r[d > 0].sum()), r


def _exact_p(w_plus: float, ranks: np.ndarray) -> float:
    # ranks are multiples of 1/2, so doubled ranks are integers and the null
    # distribution of 2W+ over all 2^n sign patterns is a subset-sum count
    twice = np.rint(2 * ranks).astype(np.int64)
    top = int(twice.sum())
    counts = np.zeros(top + 1)
    counts[0] = 1.0
    for r in twice:
        counts[r:] = counts[r:] + counts[:top + 1 - r].copy()
    counts /= counts.sum()
    w = int(round(2 * w_plus))
    lower = counts[:w + 1].sum()
    upper = counts[w:].sum()
    return float(min(1.0, 2.0 * min(lower, upper)))


def wilcoxon_signed_rank(a, b) -> float:
    """Two-sided p-value of the Wilcoxon signed-rank test on paired scores.

    Zero differences are dropped. Up to :data:`EXACT_LIMIT` non-zero pairs the
    null distribution is enumerated exactly (the midranks of tied magnitudes
    included); beyond that a normal approximation with tie-corrected variance
    and no continuity correction is used. All-zero differences give 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired score vectors must be one-dimensional and of equal length")
    w, ranks = signed_rank_statistic(a, b)
    n = ranks.shape[0]
    if n == 0:
        return 1.0
    if n <= EXACT_LIMIT:
        return _exact_p(w, ranks)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
    if var <= 0:
        return 1.0
    z = (w - mean) / math.sqrt(var)
    return float(min(1.0, math.erfc(abs(z) / math.sqrt(2.0))))


def holm(p_values, level: float = HOLM_LEVEL) -> np.ndarray:
    """Holm step-down: True where the hypothesis is rejected at family-wise ``level``."""
    p = np.asarray(p_values, dtype=np.float64)
    m = p.shape[0]
    reject = np.zeros(m, dtype=bool)
    for i, k in enumerate(np.argsort(p, kind="mergesort")):
        if p[k] > level / (m - i):
            break
        reject[k] = True
    return reject


def average_ranks(scores, higher_is_better: bool = True) -> np.ndarray:
    """Mean over datasets (columns) of each classifier's (row's) rank, 1 = best, ties averaged."""
    S = np.asarray(scores, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] < 2 or S.shape[1] < 1:
        raise ValueError("scores must be a (classifiers, datasets) matrix with at least two classifiers")
    if np.isnan(S).any():
        raise ValueError("the score table has missing entries")
    ranks = np.column_stack([midranks(-col if higher_is_better else col) for col in S.T])
    return ranks.mean(axis=1)


@dataclasses.dataclass
class Comparison:
    classifiers: list
    ranks: np.ndarray
    pairs: list  # (i, j, p_value, significant)
    cliques: list  # tuples of classifier names, best-ranked first

    def order(self) -> list:
        return [self.classifiers[i] for i in np.argsort(self.ranks, kind="mergesort")]


def rank_and_clique(classifiers, scores, higher_is_better: bool = True, level: float = HOLM_LEVEL) -> Comparison:
    """Average ranks, Holm-corrected pairwise Wilcoxon tests and the cliques they imply.

    Parameters
    ----------
    classifiers : sequence of str
        Row names of ``scores``.
    scores : array_like
        ``(classifiers, datasets)`` matrix of mean scores.

    Returns
    -------
    Comparison
        Cliques are the maximal runs of classifiers, consecutive in rank order
        (ties broken by name), with no significant pair inside; runs of one
        are not reported.
    """
    names = [str(c) for c in classifiers]
    S = np.asarray(scores, dtype=np.float64)
    if S.shape[1] < 2:
        raise ValueError("at least two datasets are needed for a comparison")
    ranks = average_ranks(S, higher_is_better)
    k = len(names)
    index_pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    pv = np.array([wilcoxon_signed_rank(S[i], S[j]) for i, j in index_pairs])
    rej = holm(pv, level)
    sig = np.zeros((k, k), dtype=bool)
    for (i, j), r in zip(index_pairs, rej):
        sig[i, j] = sig[j, i] = r
    order = sorted(range(k), key=lambda i: (ranks[i], names[i]))
    runs = []
    for a in range(k):
        b = a
        while b + 1 < k and not any(sig[order[b + 1], order[x]] for x in range(a, b + 1)):
            b += 1
        if b > a and not any(s <= a and b <= e for s, e in runs):
            runs.append((a, b))
    cliques = [tuple(names[order[x]] for x in range(s, e + 1)) for s, e in runs]
    pairs = [(names[i], names[j], float(p), bool(r)) for (i, j), p, r in zip(index_pairs, pv, rej)]
    return Comparison(names, ranks, pairs, cliques)
