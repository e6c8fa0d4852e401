"""Temporal Dictionary Ensemble: individual 1-NN dictionary classifiers and the GP-guided ensemble."""

from __future__ import annotations

import dataclasses
import itertools
import logging
import time

import numpy as np

from hc2.core import TimeSeriesDataset, stratified_subsample
from hc2.ensemble import EnsembleClassifier, oob_estimate, parallel_map, vote_distribution
from hc2.tde.histogram import (
    BagSet,
    _aggregate,
    _raw_keys,
    WordHistogram,
    loocv_accuracy,
    nearest_neighbours,
    similarity_matrix,
)
from hc2.tde.sfa import ALPHABET_SIZE, fit_breakpoints, window_coefficients, words_from_coefficients

__all__ = [
    "TdeParameters",
    "TdeConfig",
    "IndividualTde",
    "parameter_pool",
    "encode_parameters",
    "select_dimensions",
    "build_individual_tde",
    "gp_posterior_mean",
    "gp_propose_parameters",
    "TDE",
]

log = logging.getLogger(__name__)

WORD_LENGTHS = (16, 14, 12, 10, 8)
LEVELS = (1, 2, 3)
BINNINGS = ("MCB", "IGB")
MIN_WINDOW = 10


@dataclasses.dataclass(frozen=True)
class TdeParameters:
    word_length: int
    window: int
    normalise: bool
    levels: int
    binning: str
    alphabet_size: int = ALPHABET_SIZE

    def check(self, series_length: int) -> None:
        if self.window > series_length:
            raise ValueError(f"window {self.window} exceeds series length {series_length}")
        if self.word_length > 2 * self.window:
            raise ValueError("word length needs at most two coefficients per window value")
        if self.alphabet_size != ALPHABET_SIZE:
            raise ValueError("only an alphabet of four letters is supported")


def parameter_pool(series_length: int) -> list[TdeParameters]:
    """Every parameter combination for series of length ``series_length`` in a fixed order."""
    if series_length < MIN_WINDOW:
        raise ValueError(f"TDE needs series of length >= {MIN_WINDOW}")
    return [TdeParameters(l, w, p, h, b)
            for l, w, p, h, b in itertools.product(WORD_LENGTHS, range(MIN_WINDOW, series_length + 1),
                                                   (True, False), LEVELS, BINNINGS)]


def encode_parameters(pool) -> np.ndarray:
    """Six-component encodings ``(l, w, p, alpha, h, b)`` min-max scaled over ``pool``; constant columns are 0."""
    E = np.array([[p.word_length, p.window, float(p.normalise), p.alphabet_size, p.levels,
                   float(p.binning == "IGB")] for p in pool], dtype=np.float64)
    lo = E.min(axis=0)
    span = E.max(axis=0) - lo
    return np.where(span > 0, (E - lo) / np.where(span > 0, span, 1.0), 0.0)


def _case_words(x, dims, bps, params, stride=1):
    """Word sequences ``(g, n_windows)`` of one case ``(d, m)``."""
    return np.stack([
        words_from_coefficients(window_coefficients(x[g], params.window, params.word_length,
                                                    params.normalise, stride), bps[i])
        for i, g in enumerate(dims)
    ])


def _histogram(words, dims, params, series_length, bigrams) -> WordHistogram:
    hi, lo, wt = _raw_keys(words, np.asarray(dims, dtype=np.int64), series_length, params.window,
                           params.levels, bigrams)
    return WordHistogram(*_aggregate(hi, lo, wt))


def _fit_dim_breakpoints(X, y, g, params, n_classes, stride=1):
    coefs = np.concatenate([window_coefficients(X[i, g], params.window, params.word_length,
                                                params.normalise, stride) for i in range(X.shape[0])])
    labels = np.repeat(y, coefs.shape[0] // X.shape[0])
    return fit_breakpoints(params.binning, coefs, labels, n_classes)


def select_dimensions(X, y, params: TdeParameters, n_classes: int, threshold: float = 0.85,
                      max_dims: int = 20) -> tuple[list[int], np.ndarray | None]:
    """Dimensions worth keeping for one member, with their estimated accuracies.

    Each dimension is scored by leave-one-out 1-NN on histograms of disjoint
    (stride ``w``) windows. Dimensions scoring at least ``threshold`` times the
    best are kept, then the ``max_dims`` best (ties to the lower index).
    """
    d = X.shape[1]
    if d == 1:
        return [0], None
    accs = np.empty(d)
    m = X.shape[2]
    for g in range(d):
        bp = _fit_dim_breakpoints(X, y, g, params, n_classes, stride=params.window)
        bags = [_histogram(_case_words(X[i], [g], [bp], params, stride=params.window), [g], params, m, False)
                for i in range(X.shape[0])]
        accs[g] = loocv_accuracy(similarity_matrix(BagSet.pack(bags)), y)
    return select_from_accuracies(accs, threshold, max_dims), accs


def select_from_accuracies(accs, threshold: float = 0.85, max_dims: int = 20) -> list[int]:
    accs = np.asarray(accs, dtype=np.float64)
    keep = np.flatnonzero(accs >= threshold * accs.max())
    order = keep[np.argsort(-accs[keep], kind="stable")][:max_dims]
    return sorted(int(g) for g in order)


@dataclasses.dataclass(eq=False)
class IndividualTde:
    """One dictionary 1-NN classifier built on a train subsample."""

    parameters: TdeParameters
    dimensions: list
    breakpoints: np.ndarray
    bags: BagSet
    labels: np.ndarray
    subsample: np.ndarray
    bigrams: bool
    series_length: int
    accuracy: float = 0.0

    def transform(self, X) -> BagSet:
        return BagSet.pack([
            _histogram(_case_words(x, self.dimensions, self.breakpoints, self.parameters),
                       self.dimensions, self.parameters, self.series_length, self.bigrams)
            for x in X
        ])

    def predict(self, X) -> np.ndarray:
        sim = similarity_matrix(self.transform(X), self.bags)
        return self.labels[nearest_neighbours(sim)]

    def recompute_accuracy(self) -> float:
        return loocv_accuracy(similarity_matrix(self.bags), self.labels)


def build_individual_tde(X, y, params: TdeParameters, n_classes: int, n_dimensions_total: int | None = None,
                         subsample=None) -> IndividualTde:
    """Build one member on cases ``X`` ``(n', d, m)`` and score it by leave-one-out.

    Bigrams are only recorded for univariate data.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d, m = X.shape
    params.check(m)
    dims, _ = select_dimensions(X, y, params, n_classes)
    bps = np.stack([_fit_dim_breakpoints(X, y, g, params, n_classes) for g in dims])
    bigrams = (n_dimensions_total or d) == 1
    bags = BagSet.pack([_histogram(_case_words(X[i], dims, bps, params), dims, params, m, bigrams)
                        for i in range(n)])
    sub = np.arange(n) if subsample is None else np.asarray(subsample, dtype=np.int64)
    member = IndividualTde(params, dims, bps, bags, y, sub, bigrams, m)
    member.accuracy = loocv_accuracy(similarity_matrix(bags), y) if n >= 2 else 0.0
    return member


def gp_posterior_mean(train_x, train_y, query_x, noise: float = 0.01) -> np.ndarray:
    """Zero-mean GP regression with a unit squared-exponential kernel; raises LinAlgError if singular."""
    train_x = np.asarray(train_x, dtype=np.float64)
    query_x = np.asarray(query_x, dtype=np.float64)

    def kern(a, b):
        d2 = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
        return np.exp(-0.5 * np.maximum(d2, 0.0))

    K = kern(train_x, train_x) + noise * np.eye(train_x.shape[0])
    L = np.linalg.cholesky(K)
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, np.asarray(train_y, dtype=np.float64)))
    return kern(query_x, train_x) @ alpha


def gp_propose_parameters(history_x, history_y, remaining_x, rng: np.random.Generator | None = None) -> int:
    """Index into ``remaining_x`` with the highest predicted accuracy (ties to the first).

    Falls back to a uniform draw if the covariance matrix is singular.
    """
    try:
        mean = gp_posterior_mean(history_x, history_y, remaining_x)
    except np.linalg.LinAlgError:
        log.warning("singular GP covariance; drawing the next parameter set at random")
        rng = rng or np.random.default_rng(0)
        return int(rng.integers(len(remaining_x)))
    return int(np.argmax(mean))


@dataclasses.dataclass(frozen=True)
class TdeConfig:
    n_parameter_samples: int = 250
    max_ensemble_size: int = 50
    n_random: int = 50
    subsample: float = 0.7

    def __post_init__(self):
        if self.n_parameter_samples < 1 or self.max_ensemble_size < 1:
            raise ValueError("k and s must be positive")


class TDE(EnsembleClassifier):
    """Temporal Dictionary Ensemble.

    ``k`` candidate members are built, each on a stratified 70% subsample
    with its own parameters (random for the first 50, then the GP's best
    guess), and the ``s`` best by leave-one-out accuracy are kept and
    weighted by accuracy to the fourth power. The train estimate uses the
    retained members' left-out 30%.
    """

    component_id = "TDE"

    def __init__(self, config: TdeConfig | None = None):
        self.config = config or TdeConfig()

    def _fit(self, train: TimeSeriesDataset, stream, state) -> None:
        cfg = self.config
        X, y, c = train.X, train.y, train.n_classes
        pool = parameter_pool(train.series_length)
        enc = encode_parameters(pool)
        state.setdefault("cursor", 0)
        state.setdefault("remaining", np.ones(len(pool), dtype=bool))
        state.setdefault("history", [])
        members = state.setdefault("members", [])
        deadline = self._deadline.split(0.8)
        durations = []

        def choose(i, available):
            rng = stream.child(0).child(i).generator()
            remaining = np.flatnonzero(available)
            if i < cfg.n_random:
                pick = remaining[rng.integers(remaining.shape[0])]
            else:
                hist = state["history"]
                hx = enc[[h[0] for h in hist]]
                hy = np.array([h[1] for h in hist])
                pick = remaining[gp_propose_parameters(hx, hy, enc[remaining], rng)]
            available[pick] = False
            return int(pick), rng

        def build(job):
            pick, rng = job
            sub = stratified_subsample(y, cfg.subsample, rng)
            t0 = time.perf_counter()
            member = build_individual_tde(X[sub], y[sub], pool[pick], c, train.n_dimensions, sub)
            return pick, member, time.perf_counter() - t0

        while state["cursor"] < cfg.n_parameter_samples and state["remaining"].any():
            i = state["cursor"]
            if members and deadline.at is not None:
                if time.monotonic() + max(durations, default=0.0) > deadline.at:
                    break
            width = 1 if i >= cfg.n_random else min(self._threads, cfg.n_random - i,
                                                     cfg.n_parameter_samples - i)
            # picks are committed to the state one by one, so an interrupt
            # between members leaves a consistent, resumable state
            available = state["remaining"].copy()
            jobs = []
            for j in range(i, i + width):
                if not available.any():
                    break
                jobs.append(choose(j, available))
            for pick, member, took in parallel_map(build, jobs, self._threads):
                durations.append(took)
                state["remaining"][pick] = False
                self._retain(members, member)
                state["history"].append((pick, member.accuracy))
                state["cursor"] += 1
                self._progress()

        self.members_ = list(members)
        self.weights_ = np.array([mb.accuracy ** 4 for mb in self.members_])
        self.parameter_history_ = [(pool[p], a) for p, a in state["history"]]
        self.train_estimate_ = self._oob(train)

    def _retain(self, members: list, member: IndividualTde) -> None:
        if len(members) < self.config.max_ensemble_size:
            members.append(member)
            return
        accs = np.array([mb.accuracy for mb in members])
        worst = int(np.argmin(accs))
        if member.accuracy > accs[worst]:
            members[worst] = member

    def _oob(self, train):
        n = train.n_cases
        preds = np.full((len(self.members_), n), -1, dtype=np.int64)
        for r, mb in enumerate(self.members_):
            out = np.ones(n, dtype=bool)
            out[mb.subsample] = False
            if out.any():
                preds[r, out] = mb.predict(train.X[out])
        return oob_estimate(preds, train.y, train.n_classes, self.weights_,
                            fallback_predictions=lambda: self.predict(train))

    def member_predictions(self, X) -> np.ndarray:
        return np.array(parallel_map(lambda mb: mb.predict(X), self.members_, getattr(self, "_threads", 1)))

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        return vote_distribution(self.member_predictions(X), self.weights_, self.n_classes_)
