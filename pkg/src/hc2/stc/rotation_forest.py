"""Rotation forest: trees on features rotated by per-group principal components."""

from __future__ import annotations

import dataclasses

import numpy as np

from hc2.tree import TimeSeriesTree, fit_tree

__all__ = ["principal_components", "RotationTree", "build_rotation_tree", "RotationForest"]

GROUP_SIZE = 3


def principal_components(A) -> np.ndarray:
    """Eigenvectors of the covariance of ``A`` as columns, by descending eigenvalue.

    Each vector's sign makes its largest-magnitude loading positive (first
    such loading on ties), so the result is platform independent.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] < 2:
        C = np.zeros((A.shape[1], A.shape[1]))
    else:
        C = np.cov(A, rowvar=False).reshape(A.shape[1], A.shape[1])
    vals, vecs = np.linalg.eigh(C)
    order = np.argsort(-vals, kind="stable")
    vecs = vecs[:, order]
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


@dataclasses.dataclass(eq=False)
class RotationTree:
    """One tree plus its rotation, stored sparsely as feature groups and their component blocks."""

    groups: list
    components: list
    tree: TimeSeriesTree

    def rotate(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=np.float64)
        return np.hstack([F[:, g] @ c for g, c in zip(self.groups, self.components)])

    def rotation_matrix(self, n_features: int) -> np.ndarray:
        """Dense ``(p, p)`` equivalent of :meth:`rotate` (columns in group order)."""
        R = np.zeros((n_features, n_features))
        col = 0
        for g, c in zip(self.groups, self.components):
            R[np.ix_(g, range(col, col + c.shape[1]))] = c
            col += c.shape[1]
        return R

    def predict_proba(self, F) -> np.ndarray:
        return self.tree.predict_proba(self.rotate(F))


def build_rotation_tree(F, y, n_classes: int, rng: np.random.Generator, sample=None) -> RotationTree:
    """Fit one rotation tree on the rows ``sample`` of ``F`` (all rows by default).

    Columns are shuffled into groups of three. For each group a random
    non-empty subset of classes is drawn and a 75% bootstrap of their cases
    fits the group's components. Columns constant in that sample skip the
    component fit and pass through unchanged.
    """
    F = np.asarray(F, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    rows = np.arange(F.shape[0]) if sample is None else np.asarray(sample, dtype=np.int64)
    p = F.shape[1]
    perm = rng.permutation(p)
    groups, comps = [], []
    present = np.unique(y[rows])
    for start in range(0, p, GROUP_SIZE):
        g = np.sort(perm[start:start + GROUP_SIZE])
        while True:
            chosen = present[rng.random(present.shape[0]) < 0.5]
            if chosen.size:
                break
        pool = rows[np.isin(y[rows], chosen)]
        size = max(1, int(round(0.75 * pool.shape[0])))
        boot = pool[rng.integers(0, pool.shape[0], size=size)]
        A = F[np.ix_(boot, g)]
        varying = A.std(axis=0) > 0
        C = np.zeros((g.shape[0], g.shape[0]))
        fixed = np.flatnonzero(~varying)
        live = np.flatnonzero(varying)
        if live.size:
            C[np.ix_(live, np.arange(live.size))] = principal_components(A[:, live])
        for k, col in enumerate(fixed):
            C[col, live.size + k] = 1.0
        groups.append(g)
        comps.append(C)
    rt = RotationTree(groups, comps, None)
    rt.tree = fit_tree(rt.rotate(F[rows]), y[rows], n_classes)
    return rt


@dataclasses.dataclass(eq=False)
class RotationForest:
    trees: list
    n_classes: int

    def predict_proba(self, F) -> np.ndarray:
        """Average of the trees' leaf distributions, renormalised."""
        total = sum(t.predict_proba(F) for t in self.trees)
        return total / total.sum(axis=1, keepdims=True)

    def predict(self, F) -> np.ndarray:
        return np.argmax(self.predict_proba(F), axis=1)
