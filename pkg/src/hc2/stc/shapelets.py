"""Binary shapelets: z-normalised subsequence distance, one-vs-rest information gain, and a contracted random search."""

from __future__ import annotations

import dataclasses
import math
import time

import numba as nb
import numpy as np

from hc2.core import STD_EPS

__all__ = [
    "Shapelet",
    "ShapeletPool",
    "shapelet_distance",
    "shapelet_quality",
    "binary_information_gain",
    "shapelet_transform",
    "candidate_space_size",
    "enumerate_candidate",
    "sample_candidate",
    "evaluate_candidate",
    "contracted_shapelet_search",
    "SearchResult",
]


@nb.njit(cache=True, nogil=True)
def _znorm(x):
    n = x.shape[0]
    mu = 0.0
    for v in x:
        mu += v
    mu /= n
    var = 0.0
    for v in x:
        var += (v - mu) * (v - mu)
    sd = np.sqrt(var / n)
    out = np.zeros(n)
    if sd > STD_EPS:
        for i in range(n):
            out[i] = (x[i] - mu) / sd
    return out


@nb.njit(cache=True, nogil=True)
def _distance(s, x):
    ls = s.shape[0]
    best = np.inf
    for a in range(x.shape[0] - ls + 1):
        mu = 0.0
        for i in range(ls):
            mu += x[a + i]
        mu /= ls
        var = 0.0
        for i in range(ls):
            var += (x[a + i] - mu) * (x[a + i] - mu)
        sd = np.sqrt(var / ls)
        acc = 0.0
        if sd > STD_EPS:
            for i in range(ls):
                diff = s[i] - (x[a + i] - mu) / sd
                acc += diff * diff
                if acc >= best:
                    break
        else:
            for i in range(ls):
                acc += s[i] * s[i]
        if acc < best:
            best = acc
    return best / ls


@nb.njit(cache=True, nogil=True)
def _distances(s, X, dim):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        out[i] = _distance(s, X[i, dim])
    return out


def shapelet_distance(shapelet_values, series) -> float:
    """Length-normalised squared distance to the best-matching z-normalised window."""
    s = np.ascontiguousarray(shapelet_values, dtype=np.float64)
    x = np.ascontiguousarray(series, dtype=np.float64)
    if s.shape[0] > x.shape[0]:
        raise ValueError("shapelet longer than the series")
    return float(_distance(s, x))


@nb.njit(cache=True, nogil=True)
def _binary_gain(dist, is_target):
    n = dist.shape[0]
    order = np.argsort(dist, kind="mergesort")
    n_pos = 0
    for i in range(n):
        if is_target[i]:
            n_pos += 1
    n_neg = n - n_pos

    def h(p, q):
        t = p + q
        e = 0.0
        if p > 0:
            e -= p / t * np.log2(p / t)
        if q > 0:
            e -= q / t * np.log2(q / t)
        return e

    parent = h(n_pos, n_neg)
    best = 0.0
    lp = 0
    ln = 0
    for k in range(n - 1):
        if is_target[order[k]]:
            lp += 1
        else:
            ln += 1
        if dist[order[k + 1]] <= dist[order[k]]:
            continue
        nl = k + 1
        nr = n - nl
        g = parent - nl / n * h(lp, ln) - nr / n * h(n_pos - lp, n_neg - ln)
        if g > best:
            best = g
    return best


def binary_information_gain(distances, is_target) -> float:
    """Best information gain of a threshold on ``distances`` separating target from the rest."""
    return float(_binary_gain(np.ascontiguousarray(distances, dtype=np.float64),
                              np.ascontiguousarray(is_target, dtype=np.bool_)))


@dataclasses.dataclass(eq=False)
class Shapelet:
    values: np.ndarray
    dimension: int
    case: int
    start: int
    target_class: int
    quality: float

    @property
    def length(self) -> int:
        return self.values.shape[0]

    def overlaps(self, other: "Shapelet") -> bool:
        """Same origin series and dimension, overlapping by more than half the shorter length."""
        if self.case != other.case or self.dimension != other.dimension:
            return False
        inter = min(self.start + self.length, other.start + other.length) - max(self.start, other.start)
        return inter > 0.5 * min(self.length, other.length)


def shapelet_quality(shapelet: Shapelet, X, y) -> float:
    """One-vs-rest information gain of the shapelet's distances to every case of ``X``."""
    d = _distances(np.ascontiguousarray(shapelet.values), np.ascontiguousarray(X, dtype=np.float64),
                   shapelet.dimension)
    return binary_information_gain(d, np.asarray(y) == shapelet.target_class)


@nb.njit(cache=True, nogil=True)
def _transform(values, offsets, dims, X):
    n = X.shape[0]
    k = dims.shape[0]
    out = np.empty((n, k))
    for j in range(k):
        s = values[offsets[j]:offsets[j + 1]]
        for i in range(n):
            out[i, j] = _distance(s, X[i, dims[j]])
    return out


def shapelet_transform(shapelets, X) -> np.ndarray:
    """``(n, |S|)`` matrix of distances from each case to each shapelet."""
    if not shapelets:
        raise ValueError("the shapelet set is empty")
    values = np.concatenate([s.values for s in shapelets])
    offsets = np.concatenate([[0], np.cumsum([s.length for s in shapelets])]).astype(np.int64)
    dims = np.array([s.dimension for s in shapelets], dtype=np.int64)
    return _transform(values, offsets, dims, np.ascontiguousarray(X, dtype=np.float64))


class ShapeletPool:
    """Best shapelets per class, each pool sorted by quality (descending, stable in insertion order).

    A candidate overlapping a retained shapelet from the same series is only
    admitted if it beats every such shapelet, which it then replaces.
    """

    def __init__(self, n_classes: int, capacity: int):
        self.quota = max(1, capacity // n_classes)
        self.pools: list[list[Shapelet]] = [[] for _ in range(n_classes)]

    def add(self, s: Shapelet) -> bool:
        pool = self.pools[s.target_class]
        similar = [p for p in pool if p.overlaps(s)]
        if any(p.quality >= s.quality for p in similar):
            return False
        others = [p for p in pool if not p.overlaps(s)]
        if len(others) >= self.quota and s.quality <= others[-1].quality:
            return False
        for p in similar:
            pool.remove(p)
        pos = len(pool)
        while pos > 0 and pool[pos - 1].quality < s.quality:
            pos -= 1
        pool.insert(pos, s)
        del pool[self.quota:]
        return True

    def shapelets(self) -> list[Shapelet]:
        """Retained shapelets class by class."""
        return [s for pool in self.pools for s in pool]

    def __len__(self) -> int:
        return sum(len(p) for p in self.pools)


def candidate_space_size(n: int, d: int, m: int, min_length: int = 3) -> int:
    """Number of distinct (case, dimension, length, start) candidates."""
    per_series = sum(m - l + 1 for l in range(min_length, m + 1))
    return n * d * per_series


def enumerate_candidate(t: int, n: int, d: int, m: int, min_length: int = 3):
    """The ``t``-th candidate in case, dimension, length, start order."""
    per_series = candidate_space_size(1, 1, m, min_length)
    case, rest = divmod(t, d * per_series)
    dim, rest = divmod(rest, per_series)
    length = min_length
    while rest >= m - length + 1:
        rest -= m - length + 1
        length += 1
    return case, dim, length, rest


def sample_candidate(rng: np.random.Generator, n: int, d: int, m: int, min_length: int = 3):
    """Uniform case, dimension, length in ``[min_length, m]`` and a start that fits."""
    case = int(rng.integers(n))
    dim = int(rng.integers(d))
    length = int(rng.integers(min_length, m + 1))
    start = int(rng.integers(0, m - length + 1))
    return case, dim, length, start


def evaluate_candidate(X, y, case: int, dim: int, length: int, start: int) -> Shapelet:
    """Cut, normalise and score one candidate.

    The distances to the train cases are kept on ``_train_distances`` (not
    part of the model), so the train transform needs no recomputation.
    """
    values = _znorm(np.ascontiguousarray(X[case, dim, start:start + length]))
    s = Shapelet(values, dim, case, start, int(y[case]), 0.0)
    d = _distances(values, X, dim)
    s.quality = binary_information_gain(d, np.asarray(y) == s.target_class)
    s._train_distances = d
    return s


@dataclasses.dataclass
class SearchResult:
    shapelets: list
    n_candidates: int
    exhaustive: bool


def contracted_shapelet_search(
    X,
    y,
    n_classes: int,
    stream,
    *,
    n_candidates: int | None = None,
    seconds: float | None = None,
    state: dict | None = None,
    on_progress=None,
    checkpoint_every: int = 50,
    threads: int = 1,
) -> SearchResult:
    """Random search for binary shapelets under a candidate-count budget.

    A time budget ``seconds`` is turned into a count by timing the first ten
    candidates (``n_candidates``, if also given, caps that count). When the
    budget covers the whole candidate space every candidate is evaluated
    once, in order, instead of sampling.
    Candidate ``t`` draws from ``stream.child(t)``, so the result depends
    only on the seed and the count.
    """
    from hc2.ensemble import parallel_map

    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d, m = X.shape
    space = candidate_space_size(n, d, m)
    state = {} if state is None else state
    if "pool" not in state:
        state["pool"] = ShapeletPool(n_classes, min(10 * n, 1000))
        state["cursor"] = 0
        # with a time budget the count is only known after calibration
        state["budget"] = n_candidates if seconds is None else None
    pool: ShapeletPool = state["pool"]

    def candidate(t):
        if state["budget"] is not None and state["budget"] >= space:
            return evaluate_candidate(X, y, *enumerate_candidate(t, n, d, m))
        return evaluate_candidate(X, y, *sample_candidate(stream.child(t).generator(), n, d, m))

    def run(upto):
        while state["cursor"] < upto:
            batch = list(range(state["cursor"], min(upto, state["cursor"] + max(1, threads))))
            for s in parallel_map(candidate, batch, threads):
                pool.add(s)
                state["cursor"] += 1
                if on_progress is not None and state["cursor"] % checkpoint_every == 0:
                    on_progress()

    if state["budget"] is None:
        if seconds is None:
            raise ValueError("give a candidate count or a time budget")
        t0 = time.perf_counter()
        calib = min(10, space)
        state["budget"] = calib  # provisional, so the calibration burst samples
        run(calib)
        per = (time.perf_counter() - t0) / calib
        state["budget"] = max(calib, int(math.floor(seconds / max(per, 1e-9))))
        if n_candidates is not None:
            state["budget"] = max(calib, min(state["budget"], n_candidates))
        if state["budget"] >= space:
            # the space fits the budget: restart as an exhaustive pass
            state["pool"] = pool = ShapeletPool(n_classes, min(10 * n, 1000))
            state["cursor"] = 0
    total = min(state["budget"], space)
    run(total)
    return SearchResult(pool.shapelets(), state["cursor"], state["budget"] >= space)
