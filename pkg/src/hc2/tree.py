"""Information-gain binary decision tree shared by DrCIF and the rotation forest.

Splits are searched exhaustively over midpoints of consecutive distinct
values. Equal gains are resolved by the larger margin (half the gap around
the threshold), then by the lower column index, then by the lower threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

__all__ = ["TimeSeriesTree", "fit_tree", "entropy", "GAIN_TOL"]

# Gains within this distance count as equal for tie-breaking.
GAIN_TOL = 1e-12


@nb.njit(cache=True, nogil=True)
def _entropy(counts, total):
    if total <= 0:
        return 0.0
    h = 0.0
    for k in range(counts.shape[0]):
        if counts[k] > 0:
            p = counts[k] / total
            h -= p * np.log2(p)
    return h


def entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    return float(_entropy(counts, counts.sum()))


@nb.njit(cache=True, nogil=True)
def _best_split(X, y, idx, n_classes):
    n = idx.shape[0]
    parent = np.zeros(n_classes)
    for i in range(n):
        parent[y[idx[i]]] += 1.0
    h_parent = _entropy(parent, n)
    best_gain = -1.0
    best_margin = -1.0
    best_col = -1
    best_thr = 0.0
    left = np.zeros(n_classes)
    right = np.zeros(n_classes)
    vals = np.empty(n)
    labs = np.empty(n, dtype=np.int64)
    for j in range(X.shape[1]):
        for i in range(n):
            vals[i] = X[idx[i], j]
        order = np.argsort(vals, kind="mergesort")
        for i in range(n):
            labs[i] = y[idx[order[i]]]
        sv = vals[order]
        left[:] = 0.0
        right[:] = parent
        for k in range(n - 1):
            left[labs[k]] += 1.0
            right[labs[k]] -= 1.0
            if sv[k + 1] <= sv[k]:
                continue
            nl = k + 1.0
            nr = n - nl
            gain = h_parent - (nl / n) * _entropy(left, nl) - (nr / n) * _entropy(right, nr)
            margin = 0.5 * (sv[k + 1] - sv[k])
            better = False
            if gain > best_gain + 1e-12:
                better = True
            elif gain >= best_gain - 1e-12 and margin > best_margin:
                better = True
            if better:
                best_gain = gain
                best_margin = margin
                best_col = j
                best_thr = sv[k] + margin
    return best_col, best_thr, best_gain, parent


@nb.njit(cache=True, nogil=True)
def _fit(X, y, n_classes):
    n = X.shape[0]
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    gain = np.zeros(cap)
    counts = np.zeros((cap, n_classes))
    # explicit stack of (node id, member indices)
    stack_nodes = [0]
    stack_idx = [np.arange(n)]
    n_nodes = 1
    while len(stack_nodes) > 0:
        node = stack_nodes.pop()
        idx = stack_idx.pop()
        m = idx.shape[0]
        for i in range(m):
            counts[node, y[idx[i]]] += 1.0
        pure = False
        for k in range(n_classes):
            if counts[node, k] == m:
                pure = True
        if pure or m <= 1:
            continue
        col, thr, g, _ = _best_split(X, y, idx, n_classes)
        if col < 0 or g <= 1e-12:
            continue
        go_left = X[idx, col] <= thr
        feature[node] = col
        threshold[node] = thr
        gain[node] = g
        left[node] = n_nodes
        right[node] = n_nodes + 1
        n_nodes += 2
        # push right first so the left subtree is numbered and built first
        stack_nodes.append(right[node])
        stack_idx.append(idx[~go_left])
        stack_nodes.append(left[node])
        stack_idx.append(idx[go_left])
    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
            gain[:n_nodes], counts[:n_nodes])


@nb.njit(cache=True, nogil=True)
def _predict(X, feature, threshold, left, right, dist):
    out = np.empty((X.shape[0], dist.shape[1]))
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = dist[node]
    return out


@dataclass(eq=False)
class TimeSeriesTree:
    """Fitted tree stored as flat node arrays (node 0 is the root)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    gain: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_classes(self) -> int:
        return self.counts.shape[1]

    @property
    def leaf_distributions(self) -> np.ndarray:
        return self.counts / self.counts.sum(axis=1, keepdims=True)

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def predict_proba(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _predict(X, self.feature, self.threshold, self.left, self.right, self.leaf_distributions)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def fit_tree(X, y, n_classes: int) -> TimeSeriesTree:
    """Grow an unpruned information-gain tree on ``X`` (n x p) and labels ``y``.

    Leaves are made when a node is pure, holds one case, or no split has
    positive gain. Cases with a value at or below the threshold go left.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise ValueError("X must be (n, p) with n >= 1 matching y")
    return TimeSeriesTree(*_fit(X, y, int(n_classes)))
