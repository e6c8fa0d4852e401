"""1-nearest-neighbour Euclidean distance baseline."""

from __future__ import annotations

import numpy as np

from hc2.ensemble import EnsembleClassifier, OutOfBagEstimate

__all__ = ["OneNearestNeighbour", "squared_distances"]


def squared_distances(A, B) -> np.ndarray:
    """``(len(A), len(B))`` squared Euclidean distances between flattened cases."""
    A = np.asarray(A, dtype=np.float64).reshape(len(A), -1)
    B = np.asarray(B, dtype=np.float64).reshape(len(B), -1)
    out = np.empty((A.shape[0], B.shape[0]))
    for i in range(A.shape[0]):
        diff = B - A[i]
        out[i] = np.einsum("ij,ij->i", diff, diff)
    return out


class OneNearestNeighbour(EnsembleClassifier):
    """Label of the closest train case (earliest on ties); the train estimate is leave-one-out."""

    component_id = "1NN-ED"

    def __init__(self):
        self.config = None

    def _fit(self, train, stream, state) -> None:
        self.X_ = train.X.copy()
        self.y_ = train.y.copy()
        D = squared_distances(train.X, train.X)
        np.fill_diagonal(D, np.inf)
        n, c = train.n_cases, train.n_classes
        if n == 1:
            pred = train.y.copy()
        else:
            pred = self.y_[np.argmin(D, axis=1)]
        proba = np.eye(c)[pred]
        acc = float(np.mean(pred == train.y))
        self.train_estimate_ = OutOfBagEstimate(proba, np.ones(n, dtype=bool), acc, resubstitution=n == 1)

    def _predict_proba(self, X) -> np.ndarray:
        nn = np.argmin(squared_distances(X, self.X_), axis=1)
        return np.eye(self.n_classes_)[self.y_[nn]]
