"""Randomised fast-vs-naive comparisons, one function per fast path.

Each trial draws its own inputs from ``rng`` and returns the largest absolute
disagreement it saw (0.0 for exact agreement, ``inf`` for a structural mismatch).
"""

from __future__ import annotations

import numpy as np

import oracles
from hc2.arsenal.rocket import apply_kernel, ridge_solve, sample_kernel
from hc2.bench.metrics import metric_auroc
from hc2.bench.stats import wilcoxon_signed_rank
from hc2.core import periodogram
from hc2.stc.shapelets import shapelet_distance
from hc2.tde.histogram import BIGRAM_FLAG, BagSet, case_histogram, loocv_accuracy, similarity_matrix
from hc2.tde.sfa import sfa_coefficients
from hc2.tree import fit_tree

TOLERANCE = 1e-8


def trial_apply_kernel(rng):
    d = int(rng.integers(1, 4))
    m = int(rng.integers(9, 60))
    k = sample_kernel(m, d, rng)
    case = rng.standard_normal((d, m))
    fast = apply_kernel(k, case)
    slow = oracles.naive_kernel(k.weights, k.channels, k.bias, k.dilation, k.padding, case)
    return max(abs(fast[0] - slow[0]), abs(fast[1] - slow[1]))


def trial_sfa_coefficients(rng):
    w = int(rng.integers(4, 40))
    l = 2 * int(rng.integers(1, w // 2 + 1))
    x = rng.standard_normal(w) * rng.uniform(0.1, 10)
    normalise = bool(rng.integers(2))
    return float(np.max(np.abs(sfa_coefficients(x, l, normalise) - oracles.naive_sfa(x, l, normalise))))


def trial_periodogram(rng):
    x = rng.standard_normal(int(rng.integers(4, 80)))
    return float(np.max(np.abs(periodogram(x) - oracles.naive_periodogram(x))))


def trial_shapelet_distance(rng):
    m = int(rng.integers(5, 60))
    l = int(rng.integers(3, m + 1))
    s = rng.standard_normal(l)
    s = (s - s.mean()) / s.std()
    x = rng.standard_normal(m)
    if rng.integers(4) == 0:
        x[: m // 2] = 1.5  # flat stretch exercises the zero-variance window rule
    return abs(shapelet_distance(s, x) - oracles.brute_shapelet_distance(s, x))


def trial_ridge(rng):
    n = int(rng.integers(5, 30))
    p = int(rng.integers(1, 40))
    X = rng.standard_normal((n, p))
    Y = rng.standard_normal((n, int(rng.integers(1, 4)))) if rng.integers(2) else rng.standard_normal(n)
    alpha = float(10 ** rng.uniform(-3, 3))
    fast = ridge_solve(X, Y, alpha)
    slow = oracles.normal_equations_ridge(X, Y, alpha)
    return float(np.max(np.abs(fast - slow)) / max(1.0, float(np.max(np.abs(slow)))))


def trial_tree_root_split(rng):
    n = int(rng.integers(2, 13))
    p = int(rng.integers(1, 5))
    c = int(rng.integers(2, 4))
    # coarse integer grid forces duplicated values and tied gains
    X = rng.integers(0, 5, size=(n, p)).astype(np.float64) * rng.choice([1.0, 0.5])
    y = rng.integers(0, c, n)
    tree = fit_tree(X, y, c)
    best = oracles.brute_root_split(X, y, c)
    if best is None or best[0] <= 1e-12:
        return 0.0 if tree.feature[0] < 0 else np.inf
    gain, col, thr = best
    if tree.feature[0] != col:
        return np.inf
    return max(abs(tree.gain[0] - gain), abs(tree.threshold[0] - thr))


def trial_wilcoxon(rng):
    n = int(rng.integers(1, 13))
    a = rng.integers(0, 6, n).astype(np.float64)
    b = rng.integers(0, 6, n).astype(np.float64)
    return abs(wilcoxon_signed_rank(a, b) - oracles.brute_wilcoxon(a, b))


def trial_auroc(rng):
    n = int(rng.integers(2, 40))
    c = int(rng.integers(2, 5))
    y = rng.integers(0, c, n)
    y[:2] = [0, 1]
    proba = rng.dirichlet(np.ones(c), size=n)
    if rng.integers(2):
        proba = np.round(proba, 1)  # ties in scores
    return abs(metric_auroc(y, proba) - oracles.pair_counting_auroc(y, proba))


def _key_weight(key):
    hi, _ = key
    if hi & BIGRAM_FLAG:
        return 1.0
    return float(2 ** (((hi >> 32) & 0xFF) - 1))


def trial_tde_loocv(rng):
    n = int(rng.integers(2, 12))
    m = int(rng.integers(12, 30))
    w = int(rng.integers(3, m // 2))
    levels = int(rng.integers(1, 4))
    bigrams = bool(rng.integers(2))
    labels = rng.integers(0, 2, n)
    bags = [case_histogram(rng.integers(0, 6, size=(1, m - w + 1)), m, w, levels, bigrams) for _ in range(n)]
    sim = similarity_matrix(BagSet.pack(bags))
    dicts = [b.as_dict() for b in bags]
    brute = np.array([[0.0 if i == j else oracles.brute_histogram_similarity(dicts[i], dicts[j], _key_weight)
                       for j in range(n)] for i in range(n)])
    err = float(np.max(np.abs(sim - brute)))
    if n >= 2:
        err = max(err, abs(loocv_accuracy(sim, labels) - oracles.brute_loocv(brute, labels)))
    return err


TRIALS = {
    "apply_kernel": trial_apply_kernel,
    "sfa_coefficients": trial_sfa_coefficients,
    "periodogram": trial_periodogram,
    "shapelet_distance": trial_shapelet_distance,
    "ridge_solve": trial_ridge,
    "tree_root_split": trial_tree_root_split,
    "wilcoxon_exact": trial_wilcoxon,
    "auroc": trial_auroc,
    "tde_loocv": trial_tde_loocv,
}


def run_trials(name, n_trials, seed=0):
    """Worst disagreement over ``n_trials`` independent draws."""
    fn = TRIALS[name]
    worst = 0.0
    for t in range(n_trials):
        worst = max(worst, float(fn(np.random.default_rng([seed, t]))))
    return worst
