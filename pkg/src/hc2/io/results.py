"""Results files: one line per test case with true/predicted index and the class distribution.

Layout::

    <dataset>,<classifier>,<split>,<resample>
    <free-text parameter record>
    <train estimate accuracy, or -1>
    <true>,<pred>,,<p_0>,...,<p_{c-1}>
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal

import numpy as np

from hc2.core import check_distribution

__all__ = ["RunDescriptor", "ResultsFile", "quantise", "write_results", "read_results", "atomic_write"]

_SIX = Decimal("0.000001")


@dataclass(frozen=True)
class RunDescriptor:
    dataset: str
    classifier: str
    split: str = "test"
    resample: int = 0
    parameters: str = ""
    train_estimate: float | None = None


@dataclass
class ResultsFile:
    descriptor: RunDescriptor
    true: np.ndarray
    pred: np.ndarray
    probabilities: np.ndarray = field(repr=False)


def _six(p: float) -> str:
    return str(Decimal(float(p)).quantize(_SIX, rounding=ROUND_HALF_EVEN))


def quantise(probabilities) -> np.ndarray:
    """Probabilities as they read back from a results file (6 decimals, half-even)."""
    probabilities = np.asarray(probabilities, dtype=np.float64)
    flat = [float(_six(p)) for p in probabilities.ravel()]
    return np.array(flat, dtype=np.float64).reshape(probabilities.shape)


def write_results(predictions, metadata: RunDescriptor) -> str:
    """Render ``(true_index, predicted_index, distribution)`` triples as results-file text."""
    d = metadata
    if "\n" in d.parameters:
        raise ValueError("the parameter record must be a single line")
    estimate = "-1" if d.train_estimate is None else _six(d.train_estimate)
    lines = [f"{d.dataset},{d.classifier},{d.split},{d.resample}", d.parameters, estimate]
    for true, pred, dist in predictions:
        # already-quantised rows may be off by half a unit in the 6th place per class
        dist = np.asarray(dist, dtype=np.float64)
        dist = check_distribution(dist, atol=5e-7 * dist.size + 1e-12)
        lines.append(f"{int(true)},{int(pred)},," + ",".join(_six(p) for p in dist))
    return "\n".join(lines) + "\n"


def read_results(text: str) -> ResultsFile:
    lines = text.splitlines()
    if len(lines) < 3:
        raise ValueError("results file needs at least three header lines")
    first = lines[0].split(",")
    if len(first) != 4:
        raise ValueError(f"line 1 must hold dataset,classifier,split,resample: {lines[0]!r}")
    estimate = None if lines[2].strip() == "-1" else float(lines[2])
    descriptor = RunDescriptor(first[0], first[1], first[2], int(first[3]), lines[1], estimate)
    true, pred, probs = [], [], []
    for i, line in enumerate(lines[3:], start=4):
        parts = line.split(",")
        if len(parts) < 4 or parts[2] != "":
            raise ValueError(f"line {i}: malformed prediction row {line!r}")
        true.append(int(parts[0]))
        pred.append(int(parts[1]))
        probs.append([float(p) for p in parts[3:]])
    c = len(probs[0]) if probs else 0
    if any(len(p) != c for p in probs):
        raise ValueError("prediction rows disagree on the number of classes")
    return ResultsFile(descriptor, np.array(true, dtype=np.int64), np.array(pred, dtype=np.int64),
                       np.array(probs, dtype=np.float64).reshape(len(probs), c))


def atomic_write(path: str | os.PathLike, data: str | bytes) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if isinstance(data, bytes) else {"encoding": "utf-8", "newline": "\n"})) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
