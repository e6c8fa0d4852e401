"""The Arsenal: a majority-vote ensemble of small ROCKET classifiers."""

from __future__ import annotations

import dataclasses

import numpy as np

from hc2.arsenal.rocket import KernelSet, RidgeModel, fit_ridge_cv, sample_kernels, transform
from hc2.core import TimeSeriesDataset
from hc2.ensemble import EnsembleClassifier, bootstrap_indices, member_loop, oob_estimate, vote_distribution

__all__ = ["ArsenalConfig", "RocketMember", "Arsenal", "Rocket", "rocket_preset"]


@dataclasses.dataclass(frozen=True)
class ArsenalConfig:
    n_members: int = 25
    n_kernels: int = 2000

    def __post_init__(self):
        if self.n_members < 1 or self.n_kernels < 1:
            raise ValueError("need at least one member and one kernel")


@dataclasses.dataclass(eq=False)
class RocketMember:
    kernels: KernelSet
    ridge: RidgeModel

    def predict(self, X) -> np.ndarray:
        return self.ridge.predict(transform(self.kernels, X))


class Arsenal(EnsembleClassifier):
    """Ensemble of ROCKET members, each with its own kernels and ridge classifier.

    Parameters
    ----------
    config : ArsenalConfig, optional
        Ensemble size ``r`` and kernels per member ``k``.
    """

    component_id = "Arsenal"

    def __init__(self, config: ArsenalConfig | None = None):
        self.config = config or ArsenalConfig()

    def _member(self, train: TimeSeriesDataset, stream, bag: bool):
        rng = stream.generator()
        n = train.n_cases
        idx = bootstrap_indices(n, rng) if bag else np.arange(n)
        kernels = sample_kernels(train.series_length, train.n_dimensions, self.config.n_kernels, rng)
        F = transform(kernels, train.X)
        member = RocketMember(kernels, fit_ridge_cv(F[idx], train.y[idx]))
        if not bag:
            return member
        oob = np.full(n, -1, dtype=np.int64)
        out = np.ones(n, dtype=bool)
        out[idx] = False
        if out.any():
            oob[out] = member.ridge.predict(F[out])
        return oob

    def _fit(self, train: TimeSeriesDataset, stream, state) -> None:
        r = self.config.n_members
        full = state.setdefault("members", [])
        bagged = state.setdefault("bagged", [])
        if not state.get("full_done"):
            member_loop(lambda j: self._member(train, stream.child(0).child(j), False), full, r,
                        deadline=self._deadline.split(0.5), threads=self._threads, on_member=self._progress)
            state["full_done"] = True
        member_loop(lambda j: self._member(train, stream.child(1).child(j), True), bagged, r,
                    deadline=self._deadline, threads=self._threads, on_member=self._progress)
        self.members_ = list(full)
        self.oob_predictions_ = np.array(bagged, dtype=np.int64).reshape(len(bagged), train.n_cases)
        self.train_estimate_ = oob_estimate(self.oob_predictions_, train.y, train.n_classes,
                                            fallback_predictions=lambda: self.predict(train))

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        votes = np.array([mb.predict(X) for mb in self.members_])
        return vote_distribution(votes, np.ones(len(self.members_)), self.n_classes_)


class Rocket(Arsenal):
    """Plain ROCKET: an Arsenal with a single member of 10,000 kernels."""

    component_id = "ROCKET"

    def __init__(self, config: ArsenalConfig | None = None):
        super().__init__(config or ArsenalConfig(n_members=1, n_kernels=10_000))


def rocket_preset() -> Arsenal:
    return Rocket()
