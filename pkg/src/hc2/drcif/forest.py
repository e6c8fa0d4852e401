"""Diverse Representation Canonical Interval Forest."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from hc2.core import TimeSeriesDataset, first_order_differences, periodogram
from hc2.drcif.features import N_FEATURES, interval_features
from hc2.ensemble import (
    EnsembleClassifier,
    bootstrap_indices,
    member_loop,
    oob_estimate,
    vote_distribution,
)
from hc2.tree import TimeSeriesTree, fit_tree

__all__ = ["DrcifConfig", "IntervalSet", "IntervalTree", "DrCIF", "representations",
           "n_intervals", "sample_tree_inputs", "build_feature_matrix", "MIN_SERIES_LENGTH"]

REPRESENTATIONS = ("base", "differences", "periodogram")

# The periodogram has m // 2 values and intervals need rm // 2 >= 3.
MIN_SERIES_LENGTH = 12


@dataclasses.dataclass(frozen=True)
class DrcifConfig:
    n_trees: int = 500
    n_attributes: int = 10
    min_interval_length: int = 3

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("need at least one tree")
        if not 1 <= self.n_attributes <= N_FEATURES:
            raise ValueError(f"attributes per tree must lie in [1, {N_FEATURES}]")


@dataclasses.dataclass(eq=False)
class IntervalSet:
    """Intervals for one representation: parallel arrays of dimension, start and length."""

    dims: np.ndarray
    starts: np.ndarray
    lengths: np.ndarray


@dataclasses.dataclass(eq=False)
class IntervalTree:
    intervals: tuple[IntervalSet, IntervalSet, IntervalSet]
    feature_ids: np.ndarray
    tree: TimeSeriesTree

    def features(self, reps) -> np.ndarray:
        return build_feature_matrix(reps, self.intervals, self.feature_ids)


def representations(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Base series, first-order differences and periodogram of an ``(n, d, m)`` array."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return X, np.ascontiguousarray(first_order_differences(X)), np.ascontiguousarray(periodogram(X))


def n_intervals(rm: int, d: int) -> int:
    return 4 + int(math.floor(math.sqrt(d) * math.sqrt(rm) / 3))


def sample_tree_inputs(lengths, d: int, config: DrcifConfig, rng: np.random.Generator):
    """Draw the attribute subset, then per representation its intervals.

    Each interval draws its length from ``[3, rm // 2]``, then a start that
    keeps it inside the series, then its dimension.
    """
    if any(rm // 2 < config.min_interval_length for rm in lengths):
        raise ValueError("every representation needs at least six values")
    feature_ids = np.sort(rng.choice(N_FEATURES, size=config.n_attributes, replace=False)).astype(np.int64)
    sets = []
    for rm in lengths:
        k = n_intervals(rm, d)
        dims = np.empty(k, dtype=np.int64)
        starts = np.empty(k, dtype=np.int64)
        lens = np.empty(k, dtype=np.int64)
        for j in range(k):
            lens[j] = rng.integers(config.min_interval_length, rm // 2 + 1)
            starts[j] = rng.integers(0, rm - lens[j] + 1)
            dims[j] = rng.integers(0, d)
        sets.append(IntervalSet(dims, starts, lens))
    return tuple(sets), feature_ids


def build_feature_matrix(reps, intervals, feature_ids) -> np.ndarray:
    """Columns ordered representation, then interval, then feature."""
    blocks = [interval_features(R, s.dims, s.starts, s.lengths, feature_ids) for R, s in zip(reps, intervals)]
    return np.hstack(blocks)


def _vote(tree: IntervalTree, reps) -> np.ndarray:
    return tree.tree.predict(tree.features(reps))


class DrCIF(EnsembleClassifier):
    """Interval forest over base, difference and periodogram representations.

    Parameters
    ----------
    config : DrcifConfig, optional
        Number of trees and attributes per tree.

    Notes
    -----
    A second, bagged forest of the same size is built only to estimate
    accuracy out of bag; it does not vote on new cases.
    """

    component_id = "DrCIF"

    def __init__(self, config: DrcifConfig | None = None):
        self.config = config or DrcifConfig()

    def _member(self, train, reps, stream, bag: bool) -> tuple[IntervalTree, np.ndarray | None]:
        rng = stream.generator()
        n = train.n_cases
        idx = bootstrap_indices(n, rng) if bag else np.arange(n)
        lengths = [R.shape[2] for R in reps]
        intervals, fids = sample_tree_inputs(lengths, train.n_dimensions, self.config, rng)
        F = build_feature_matrix(reps, intervals, fids)
        tree = IntervalTree(intervals, fids, fit_tree(F[idx], train.y[idx], train.n_classes))
        if not bag:
            return tree, None
        oob = np.full(n, -1, dtype=np.int64)
        out = np.ones(n, dtype=bool)
        out[idx] = False
        if out.any():
            oob[out] = tree.tree.predict(F[out])
        return tree, oob

    def _fit(self, train: TimeSeriesDataset, stream, state) -> None:
        if train.series_length < MIN_SERIES_LENGTH:
            raise ValueError(f"DrCIF needs series of length >= {MIN_SERIES_LENGTH}")
        reps = representations(train.X)
        r = self.config.n_trees
        full = state.setdefault("trees", [])
        bagged = state.setdefault("bagged", [])
        self._durations = []
        if not state.get("full_done"):
            member_loop(lambda j: self._member(train, reps, stream.child(0).child(j), False)[0],
                        full, r, deadline=self._deadline.split(0.5), threads=self._threads,
                        on_member=self._progress, durations=self._durations)
            state["full_done"] = True
        member_loop(lambda j: self._member(train, reps, stream.child(1).child(j), True)[1],
                    bagged, r, deadline=self._deadline, threads=self._threads,
                    on_member=self._progress, durations=[])
        self.trees_ = list(full)
        self.oob_predictions_ = np.array(bagged, dtype=np.int64).reshape(len(bagged), train.n_cases)
        self.train_estimate_ = oob_estimate(self.oob_predictions_, train.y, train.n_classes,
                                            fallback_predictions=lambda: self._predict_votes(reps).argmax(axis=1))

    def _predict_votes(self, reps) -> np.ndarray:
        votes = np.array([_vote(t, reps) for t in self.trees_])
        return vote_distribution(votes, np.ones(len(self.trees_)), self.n_classes_)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        if X.shape[2] < MIN_SERIES_LENGTH:
            raise ValueError("series too short")
        return self._predict_votes(representations(X))
