"""Deliberately naive reference implementations used to check the fast code paths."""

from __future__ import annotations

import itertools
import math

import numpy as np


def naive_dft(x):
    """``X_k = sum_t x_t exp(-2 pi i k t / w)`` by the definition."""
    x = np.asarray(x, dtype=np.float64)
    w = x.shape[0]
    return np.array([sum(x[t] * complex(math.cos(2 * math.pi * k * t / w), -math.sin(2 * math.pi * k * t / w))
                         for t in range(w)) for k in range(w)])


def naive_sfa(window, l, normalise):
    x = np.asarray(window, dtype=np.float64)
    if normalise:
        sd = x.std()
        x = (x - x.mean()) / sd if sd > 1e-8 else np.zeros_like(x)
    F = naive_dft(x)
    first = 1 if normalise else 0
    out = []
    for k in range(first, first + l // 2):
        out += [F[k].real, F[k].imag]
    return np.array(out)


def naive_periodogram(x):
    F = naive_dft(x)
    return np.abs(F[1:len(x) // 2 + 1])


def naive_kernel(weights, channels, bias, dilation, padding, case):
    """Nested-loop convolution: returns (max, ppv)."""
    case = np.atleast_2d(case)
    m = case.shape[1]
    l = weights.shape[1]
    outs = []
    for g in range(m + 2 * padding - (l - 1) * dilation):
        v = bias
        for c, ch in enumerate(channels):
            for i in range(l):
                t = g - padding + i * dilation
                if 0 <= t < m:
                    v += weights[c, i] * case[ch, t]
        outs.append(v)
    outs = np.array(outs)
    return outs.max(), float(np.mean(outs > 0))


def brute_shapelet_distance(s, x):
    l = len(s)
    best = np.inf
    for a in range(len(x) - l + 1):
        w = np.asarray(x[a:a + l], dtype=np.float64)
        sd = w.std()
        z = (w - w.mean()) / sd if sd > 1e-8 else np.zeros(l)
        best = min(best, float(np.sum((np.asarray(s) - z) ** 2)))
    return best / l


def entropy(labels, n_classes):
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    p = np.bincount(labels, minlength=n_classes) / labels.size
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def brute_best_gain(values, is_target):
    """Best binary information gain over every threshold between distinct sorted values."""
    values = np.asarray(values, dtype=np.float64)
    t = np.asarray(is_target).astype(int)
    parent = entropy(t, 2)
    best = 0.0
    for thr in np.unique(values)[:-1]:
        left = t[values <= thr]
        right = t[values > thr]
        g = parent - len(left) / len(t) * entropy(left, 2) - len(right) / len(t) * entropy(right, 2)
        best = max(best, g)
    return best


def brute_root_split(X, y, n_classes):
    """(gain, column, threshold) of the best root split: midpoints, ties by margin then column."""
    X = np.asarray(X, dtype=np.float64)
    parent = entropy(y, n_classes)
    best = None
    for col in range(X.shape[1]):
        u = np.unique(X[:, col])
        for a, b in zip(u[:-1], u[1:]):
            thr = (a + b) / 2
            left = y[X[:, col] <= thr]
            right = y[X[:, col] > thr]
            g = parent - len(left) / len(y) * entropy(left, n_classes) - len(right) / len(y) * entropy(right, n_classes)
            key = (g, (b - a) / 2, -col)
            if best is None or key[0] > best[0][0] + 1e-12 or (
                    abs(key[0] - best[0][0]) <= 1e-12 and key[1:] > best[0][1:]):
                best = (key, col, thr)
    return None if best is None else (best[0][0], best[1], best[2])


def normal_equations_ridge(X, Y, alpha):
    X = np.asarray(X, dtype=np.float64)
    return np.linalg.solve(X.T @ X + alpha * np.eye(X.shape[1]), X.T @ np.asarray(Y, dtype=np.float64))


def brute_wilcoxon(a, b):
    """Two-sided exact p by enumerating every sign assignment of the non-zero |differences|."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return 1.0
    absd = np.abs(d)
    ranks = np.array([np.sum(absd < v) + (np.sum(absd == v) + 1) / 2 for v in absd])
    w = ranks[d > 0].sum()
    dist = [sum(r for r, s in zip(ranks, signs) if s) for signs in itertools.product((0, 1), repeat=n)]
    dist = np.array(dist)
    lo = np.mean(dist <= w + 1e-9)
    hi = np.mean(dist >= w - 1e-9)
    return min(1.0, 2 * min(lo, hi))


def pair_counting_auc(scores, positive):
    scores = np.asarray(scores, dtype=np.float64)
    pos = scores[np.asarray(positive, dtype=bool)]
    neg = scores[~np.asarray(positive, dtype=bool)]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def pair_counting_auroc(y, proba):
    y = np.asarray(y)
    num, den = 0.0, 0
    for c in range(proba.shape[1]):
        k = int(np.sum(y == c))
        if k == 0 or k == len(y):
            continue
        num += k * pair_counting_auc(proba[:, c], y == c)
        den += k
    return num / den


def brute_histogram_similarity(a: dict, b: dict, weight_of):
    return sum(weight_of(k) * min(a[k], b[k]) for k in a if k in b)


def brute_loocv(sim, labels):
    """Leave each case out and take the label of the most similar remaining case (earliest on ties)."""
    n = len(labels)
    correct = 0
    for i in range(n):
        best, best_j = -np.inf, -1
        for j in range(n):
            if j != i and sim[i][j] > best:
                best, best_j = sim[i][j], j
        correct += labels[best_j] == labels[i]
    return correct / n
