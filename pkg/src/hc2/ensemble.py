"""Machinery shared by the four ensembles: contracted member loops, bagging and out-of-bag estimates."""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

from hc2.core import TimeSeriesDataset

__all__ = [
    "BuildInterrupted",
    "Deadline",
    "member_loop",
    "parallel_map",
    "bootstrap_indices",
    "OutOfBagEstimate",
    "oob_estimate",
    "vote_distribution",
    "canonical_bytes",
    "model_digest",
    "EnsembleClassifier",
]


class BuildInterrupted(RuntimeError):
    """Raised by progress callbacks to stop a build mid-way (the state stays resumable)."""


@dataclasses.dataclass(frozen=True)
class Deadline:
    """Absolute wall-clock limit on ``time.monotonic()``; ``None`` fields mean unlimited."""

    at: float | None = None

    @classmethod
    def after(cls, seconds: float | None) -> "Deadline":
        return cls(None if seconds is None else time.monotonic() + seconds)

    @property
    def unlimited(self) -> bool:
        return self.at is None

    def remaining(self) -> float:
        return math.inf if self.at is None else self.at - time.monotonic()

    def split(self, fraction: float) -> "Deadline":
        """A deadline ``fraction`` of the way from now to this one."""
        if self.at is None:
            return self
        now = time.monotonic()
        return Deadline(now + max(0.0, self.at - now) * fraction)


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is preserved."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def member_loop(
    build: Callable[[int], Any],
    members: list,
    total: int,
    *,
    deadline: Deadline = Deadline(),
    threads: int = 1,
    on_member: Callable[[], None] | None = None,
    durations: list | None = None,
) -> bool:
    """Append ``build(j)`` to ``members`` for ``j = len(members) .. total-1``.

    Members are built in batches of ``threads``. Before each batch the loop
    predicts whether the batch would overrun ``deadline`` (using the slowest
    member seen so far) and stops if so; at least one member is always built.
    ``on_member`` runs after each appended member, in index order.
    Returns True when all ``total`` members exist.
    """
    durations = [] if durations is None else durations
    cpus = max(1, os.cpu_count() or 1)
    threads = max(1, int(threads))
    while len(members) < total:
        batch = list(range(len(members), min(total, len(members) + threads)))
        if members and not deadline.unlimited:
            slowest = max(durations) if durations else 0.0
            rounds = math.ceil(len(batch) / cpus)
            if time.monotonic() + slowest * rounds > deadline.at:
                return False

        def timed(j):
            t0 = time.perf_counter()
            out = build(j)
            return out, time.perf_counter() - t0

        for out, took in parallel_map(timed, batch, threads):
            members.append(out)
            durations.append(took)
            if on_member is not None:
                on_member()
    return True


def bootstrap_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` draws with replacement from ``0..n-1``."""
    return rng.integers(0, n, size=n)


@dataclasses.dataclass
class OutOfBagEstimate:
    """Per-case out-of-bag distributions and the resulting accuracy.

    Rows of ``proba`` are NaN for cases no member left out. ``resubstitution``
    is set when no case had an out-of-bag voter and ``accuracy`` therefore
    came from in-bag predictions.
    """

    proba: np.ndarray
    covered: np.ndarray
    accuracy: float
    resubstitution: bool = False


def vote_distribution(predictions: np.ndarray, weights: np.ndarray, n_classes: int) -> np.ndarray:
    """Weighted vote shares: ``predictions`` is (members, cases) of class indices."""
    predictions = np.asarray(predictions, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    dist = np.zeros((predictions.shape[1], n_classes))
    for row, w in zip(predictions, weights):
        dist[np.arange(predictions.shape[1]), row] += w
    total = dist.sum(axis=1, keepdims=True)
    return np.where(total > 0, dist / np.where(total > 0, total, 1.0), 1.0 / n_classes)


def oob_estimate(
    oob_predictions: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    weights: np.ndarray | None = None,
    fallback_predictions=None,
) -> OutOfBagEstimate:
    """Out-of-bag estimate from a (members, cases) matrix of predictions, ``-1`` marking in-bag.

    Each covered case gets the weighted vote of the members that did not see
    it; accuracy counts only covered cases. With no coverage at all the
    estimate falls back to ``fallback_predictions`` (resubstitution), which may
    be a zero-argument callable so the in-bag predictions are only computed
    when needed.
    """
    P = np.asarray(oob_predictions, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    n = y.shape[0]
    w = np.ones(P.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    votes = np.zeros((n, n_classes))
    for row, wj in zip(P, w):
        hit = row >= 0
        votes[np.flatnonzero(hit), row[hit]] += wj
    covered = (P >= 0).any(axis=0) if P.size else np.zeros(n, dtype=bool)
    proba = np.full((n, n_classes), np.nan)
    total = votes[covered].sum(axis=1, keepdims=True)
    cov_votes = votes[covered]
    proba[covered] = np.where(total > 0, cov_votes / np.where(total > 0, total, 1.0), 1.0 / n_classes)
    if covered.any():
        pred = np.argmax(proba[covered], axis=1)
        return OutOfBagEstimate(proba, covered, float(np.mean(pred == y[covered])))
    if fallback_predictions is None:
        return OutOfBagEstimate(proba, covered, 0.0, resubstitution=True)
    if callable(fallback_predictions):
        fallback_predictions = fallback_predictions()
    fb = np.asarray(fallback_predictions, dtype=np.int64)
    return OutOfBagEstimate(proba, covered, float(np.mean(fb == y)), resubstitution=True)


# --- canonical model bytes --------------------------------------------------

def _encode(obj, out: list) -> None:
    if obj is None:
        out.append(b"N")
    elif isinstance(obj, (bool, np.bool_)):
        out.append(b"T" if obj else b"F")
    elif isinstance(obj, (int, np.integer)):
        s = str(int(obj)).encode()
        out.append(b"i" + struct.pack("<I", len(s)) + s)
    elif isinstance(obj, (float, np.floating)):
        out.append(b"f" + struct.pack("<d", float(obj)))
    elif isinstance(obj, str):
        s = obj.encode()
        out.append(b"s" + struct.pack("<I", len(s)) + s)
    elif isinstance(obj, bytes):
        out.append(b"b" + struct.pack("<I", len(obj)) + obj)
    elif isinstance(obj, np.ndarray):
        arr = np.ascontiguousarray(obj)
        head = f"{arr.dtype.str}|{arr.shape}".encode()
        out.append(b"a" + struct.pack("<I", len(head)) + head + struct.pack("<Q", arr.nbytes) + arr.tobytes())
    elif isinstance(obj, (list, tuple)):
        out.append((b"l" if isinstance(obj, list) else b"t") + struct.pack("<I", len(obj)))
        for item in obj:
            _encode(item, out)
    elif isinstance(obj, dict):
        keys = sorted(obj, key=repr)
        out.append(b"d" + struct.pack("<I", len(keys)))
        for k in keys:
            _encode(k, out)
            _encode(obj[k], out)
    elif hasattr(obj, "__dict__"):
        fields = {k: v for k, v in vars(obj).items() if not k.startswith("_")}
        _encode(type(obj).__qualname__, out)
        _encode(fields, out)
    else:
        raise TypeError(f"cannot canonically encode {type(obj).__name__}")


def canonical_bytes(obj) -> bytes:
    """Deterministic byte encoding of a model; attributes starting with ``_`` are skipped.

    Unlike pickle, the result does not depend on object identity or sharing,
    so equal models built serially, on threads, or after a resume encode to
    the same bytes.
    """
    out: list[bytes] = []
    _encode(obj, out)
    return b"".join(out)


def model_digest(obj) -> str:
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


class EnsembleClassifier:
    """Common surface of the component classifiers.

    Subclasses implement ``_fit`` and ``_predict_proba``; fitted attributes
    are ``n_classes_``, ``train_estimate_`` (an :class:`OutOfBagEstimate`) and
    whatever the model needs to predict. Attributes whose names start with
    ``_`` (timings, progress callbacks) are excluded from the model bytes.
    """

    component_id = "base"

    def fit(
        self,
        train: TimeSeriesDataset,
        stream,
        *,
        deadline: Deadline | None = None,
        threads: int = 1,
        state: dict | None = None,
        on_progress: Callable[[dict], None] | None = None,
    ):
        """Build on ``train``; resume from ``state`` if given.

        ``on_progress(state)`` is called whenever a resumable unit of work
        completes; raising :class:`BuildInterrupted` from it stops the build.
        """
        self._deadline = deadline or Deadline()
        self._threads = max(1, int(threads))
        self._state = {} if state is None else state
        self._notify = on_progress
        self.n_classes_ = train.n_classes
        self._fit(train, stream, self._state)
        self.train_estimate_.proba.setflags(write=False)
        return self

    def __getstate__(self):
        # callbacks, deadlines and the build state are not part of a fitted model
        return {k: v for k, v in vars(self).items() if not k.startswith("_")}

    def _progress(self) -> None:
        if self._notify is not None:
            self._notify(self._state)

    def _fit(self, train, stream, state) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    def predict_proba(self, data: TimeSeriesDataset) -> np.ndarray:
        X = data.X if isinstance(data, TimeSeriesDataset) else np.asarray(data, dtype=np.float64)
        return self._predict_proba(X)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def predict(self, data) -> np.ndarray:
        return np.argmax(self.predict_proba(data), axis=1)

    @property
    def train_accuracy(self) -> float:
        return self.train_estimate_.accuracy

    def to_bytes(self) -> bytes:
        return canonical_bytes(self)
