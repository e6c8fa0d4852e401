"""Shapelet Transform Classifier: contracted shapelet search, distance transform, rotation forest."""

from __future__ import annotations

import dataclasses

import numpy as np

from hc2.core import TimeSeriesDataset
from hc2.ensemble import EnsembleClassifier, bootstrap_indices, member_loop, oob_estimate
from hc2.stc.rotation_forest import RotationForest, build_rotation_tree
from hc2.stc.shapelets import contracted_shapelet_search, shapelet_transform

__all__ = ["StcConfig", "STC"]


@dataclasses.dataclass(frozen=True)
class StcConfig:
    """Search budget and forest size.

    ``n_candidates`` fixes the search as a candidate count (reproducible);
    otherwise ``search_seconds`` is converted into a count by calibration.
    """

    search_seconds: float = 3600.0
    n_candidates: int | None = None
    n_trees: int = 200

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("need at least one tree")
        if self.n_candidates is not None and self.n_candidates < 1:
            raise ValueError("the candidate budget must be positive")


class STC(EnsembleClassifier):
    """Binary shapelet transform followed by a rotation forest.

    The train estimate comes from a second, bagged rotation forest built on
    the same transformed data.
    """

    component_id = "STC"

    def __init__(self, config: StcConfig | None = None):
        self.config = config or StcConfig()

    def _fit(self, train: TimeSeriesDataset, stream, state) -> None:
        cfg = self.config
        n, c = train.n_cases, train.n_classes
        search_state = state.setdefault("search", {})
        if self._deadline.unlimited:
            seconds = None if cfg.n_candidates is not None else cfg.search_seconds
        else:
            seconds = min(cfg.search_seconds, 0.5 * max(self._deadline.remaining(), 0.0))
        if not state.get("search_done"):
            result = contracted_shapelet_search(
                train.X, train.y, c, stream.child(0), n_candidates=cfg.n_candidates, seconds=seconds,
                state=search_state, on_progress=self._progress, threads=self._threads)
            state["search_done"] = True
            state["n_candidates"] = result.n_candidates
            state["exhaustive"] = result.exhaustive
            self._progress()
        self.shapelets_ = search_state["pool"].shapelets()
        self.n_candidates_ = state["n_candidates"]
        F = np.column_stack([sh._train_distances for sh in self.shapelets_])
        y = train.y
        trees = state.setdefault("trees", [])
        bagged = state.setdefault("bagged", [])

        def full_tree(j):
            return build_rotation_tree(F, y, c, stream.child(1).child(j).generator())

        def bag_tree(j):
            rng = stream.child(2).child(j).generator()
            idx = bootstrap_indices(n, rng)
            t = build_rotation_tree(F, y, c, rng, sample=idx)
            oob = np.full(n, -1, dtype=np.int64)
            out = np.ones(n, dtype=bool)
            out[idx] = False
            if out.any():
                oob[out] = np.argmax(t.predict_proba(F[out]), axis=1)
            return oob

        if not state.get("full_done"):
            member_loop(full_tree, trees, cfg.n_trees, deadline=self._deadline.split(0.5),
                        threads=self._threads, on_member=self._progress)
            state["full_done"] = True
        member_loop(bag_tree, bagged, cfg.n_trees, deadline=self._deadline, threads=self._threads,
                    on_member=self._progress)
        self.forest_ = RotationForest(list(trees), c)
        self.oob_predictions_ = np.array(bagged, dtype=np.int64).reshape(len(bagged), n)
        self.train_estimate_ = oob_estimate(self.oob_predictions_, y, c,
                                            fallback_predictions=lambda: self.forest_.predict(F))

    def transform(self, data) -> np.ndarray:
        X = data.X if isinstance(data, TimeSeriesDataset) else data
        return shapelet_transform(self.shapelets_, X)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.forest_.predict_proba(shapelet_transform(self.shapelets_, X))
