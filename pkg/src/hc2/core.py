"""Shared data model: datasets, class distributions, seeded streams and series transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TimeSeriesDataset",
    "RandomStream",
    "check_distribution",
    "argmax_lowest",
    "stratified_resample",
    "stratified_subsample",
    "first_order_differences",
    "periodogram",
    "znormalise",
    "STD_EPS",
]

# Windows/slices with a standard deviation at or below this are treated as constant.
STD_EPS = 1e-8


@dataclass(frozen=True, eq=False)
class TimeSeriesDataset:
    """Equal-length (possibly multivariate) labelled time series.

    Parameters
    ----------
    X : np.ndarray
        Array of shape ``(n_cases, n_dimensions, series_length)``.
    y : np.ndarray
        Integer class indices of shape ``(n_cases,)`` into ``class_labels``.
    class_labels : tuple of str
        Declared class labels; the index order fixes the order of every
        probability distribution produced for this dataset.
    name : str
        Problem name.
    """

    X: np.ndarray
    y: np.ndarray
    class_labels: tuple[str, ...]
    name: str = "unnamed"

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.int64)
        if X.ndim != 3:
            raise ValueError(f"X must be 3D (cases, dimensions, length), got shape {X.shape}")
        n, d, m = X.shape
        if n < 1 or d < 1 or m < 3:
            raise ValueError(f"need n >= 1, d >= 1 and m >= 3, got n={n}, d={d}, m={m}")
        labels = tuple(str(c) for c in self.class_labels)
        if len(labels) < 2:
            raise ValueError("at least two class labels are required")
        if len(set(labels)) != len(labels):
            raise ValueError(f"class labels must be distinct: {labels}")
        if y.shape != (n,):
            raise ValueError(f"y must have shape ({n},), got {y.shape}")
        if n and (y.min() < 0 or y.max() >= len(labels)):
            raise ValueError("class index outside the declared label set")
        if not np.all(np.isfinite(X)):
            raise ValueError("series values must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "class_labels", labels)

    @property
    def n_cases(self) -> int:
        return self.X.shape[0]

    @property
    def n_dimensions(self) -> int:
        return self.X.shape[1]

    @property
    def series_length(self) -> int:
        return self.X.shape[2]

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def is_univariate(self) -> bool:
        return self.X.shape[1] == 1

    def subset(self, indices) -> "TimeSeriesDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return TimeSeriesDataset(self.X[indices], self.y[indices], self.class_labels, self.name)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    def __len__(self) -> int:
        return self.n_cases

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeriesDataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.class_labels == other.class_labels
            and self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None

    @staticmethod
    def concatenate(first: "TimeSeriesDataset", second: "TimeSeriesDataset") -> "TimeSeriesDataset":
        if first.class_labels != second.class_labels:
            raise ValueError("datasets declare different class labels")
        if first.X.shape[1:] != second.X.shape[1:]:
            raise ValueError("datasets differ in dimensions or series length")
        return TimeSeriesDataset(
            np.concatenate([first.X, second.X]),
            np.concatenate([first.y, second.y]),
            first.class_labels,
            first.name,
        )


@dataclass(frozen=True)
class RandomStream:
    """Splittable, counter-based random stream (Philox keyed by a seed sequence).

    ``child(i)`` derives an independent stream that depends only on
    ``(seed, path)``, so members built on different threads, or after a
    checkpoint resume, see exactly the same draws as in a serial build.
    """

    seed: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def child(self, i: int) -> "RandomStream":
        if i < 0:
            raise ValueError("child index must be non-negative")
        return RandomStream(self.seed, self.path + (int(i),))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


def check_distribution(p, atol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("a class distribution is a non-empty vector")
    if np.any(p < -atol) or np.any(p > 1 + atol):
        raise ValueError(f"probabilities outside [0, 1]: {p}")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def argmax_lowest(p) -> int:
    """Index of the largest entry, ties to the lowest index."""
    return int(np.argmax(np.asarray(p)))


def stratified_resample(
    dataset: TimeSeriesDataset, original_train_size: int, seed: int
) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    """Stratified train/test resample of a train-then-test concatenated dataset.

    The first ``original_train_size`` cases form the default split, which is
    returned unchanged for ``seed == 0``. Other seeds draw, per class, exactly
    as many train cases as the default train split holds.
    """
    n = dataset.n_cases
    if seed < 0:
        raise ValueError("seed must be non-negative")
    if not 0 < original_train_size < n:
        raise ValueError(f"original train size {original_train_size} must lie in (0, {n})")
    if seed == 0:
        train_idx = np.arange(original_train_size)
        test_idx = np.arange(original_train_size, n)
        return dataset.subset(train_idx), dataset.subset(test_idx)

    wanted = np.bincount(dataset.y[:original_train_size], minlength=dataset.n_classes)
    available = dataset.class_counts()
    rng = RandomStream(seed).generator()
    train_parts = []
    for c in range(dataset.n_classes):
        members = np.flatnonzero(dataset.y == c)
        if available[c] < wanted[c]:
            raise ValueError(
                f"class {dataset.class_labels[c]!r} has {available[c]} cases but the "
                f"default split puts {wanted[c]} in train"
            )
        train_parts.append(rng.permutation(members)[: wanted[c]])
    train_idx = np.sort(np.concatenate(train_parts))
    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    test_idx = np.flatnonzero(~mask)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def stratified_subsample(y: np.ndarray, proportion: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of a stratified sample without replacement.

    Each class keeps ``round(proportion * count)`` cases, at least one.
    """
    y = np.asarray(y)
    chosen = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        k = max(1, int(round(proportion * members.size)))
        chosen.append(rng.permutation(members)[:k])
    return np.sort(np.concatenate(chosen))


def first_order_differences(series) -> np.ndarray:
    series = np.asarray(series, dtype=np.float64)
    if series.shape[-1] < 2:
        raise ValueError("differencing needs at least two observations")
    return series[..., 1:] - series[..., :-1]


def periodogram(series) -> np.ndarray:
    """DFT magnitudes for frequencies ``1..floor(m/2)`` (zero frequency dropped).

    Works along the last axis so whole datasets can be transformed at once.
    """
    series = np.asarray(series, dtype=np.float64)
    m = series.shape[-1]
    if m < 4:
        raise ValueError("periodogram needs at least four observations")
    coefs = np.fft.rfft(series, axis=-1)
    return np.abs(coefs[..., 1 : m // 2 + 1])


def znormalise(x: np.ndarray, ddof: int = 0) -> np.ndarray:
    """Z-normalise along the last axis; constant rows become all zeros."""
    x = np.asarray(x, dtype=np.float64)
    mu = x.mean(axis=-1, keepdims=True)
    sd = x.std(axis=-1, ddof=ddof, keepdims=True)
    safe = np.where(sd > STD_EPS, sd, 1.0)
    return np.where(sd > STD_EPS, (x - mu) / safe, 0.0)
