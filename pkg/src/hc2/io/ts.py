"""Reader and writer for the UCR/UEA ``.ts`` archive format (equal-length, labelled)."""

from __future__ import annotations

import io
import math
import os
import warnings
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from hc2.core import TimeSeriesDataset

__all__ = ["TsFormatError", "TsHeader", "parse_ts", "write_ts", "load_ts", "save_ts"]


class TsFormatError(ValueError):
    """Malformed ``.ts`` input. ``line`` is the 1-based line number (0 when not line-specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class TsHeader:
    problem_name: str
    is_univariate: bool
    n_dimensions: int
    is_equal_length: bool
    series_length: int
    class_labels: tuple[str, ...]

    def __post_init__(self):
        if self.is_univariate and self.n_dimensions != 1:
            raise ValueError("a univariate header must declare exactly one dimension")
        if not self.class_labels or len(set(self.class_labels)) != len(self.class_labels):
            raise ValueError("class labels must be non-empty and distinct")


_BOOL = {"true": True, "false": False}


def _parse_bool(token: str, key: str, line: int) -> bool:
    try:
        return _BOOL[token.lower()]
    except KeyError:
        raise TsFormatError(f"{key} expects true/false, got {token!r}", line) from None


def _parse_int(token: str, key: str, line: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise TsFormatError(f"{key} expects an integer, got {token!r}", line) from None
    if value < 1:
        raise TsFormatError(f"{key} must be positive, got {value}", line)
    return value


def _lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_ts(source: str | IO[str], name: str | None = None) -> TimeSeriesDataset:
    """Parse ``.ts`` text (a string or a text stream) into a dataset.

    Header keys are case-insensitive and unknown keys are skipped with a
    warning. Only equal-length, classification-labelled data is accepted.
    """
    header: dict[str, object] = {}
    labels: tuple[str, ...] | None = None
    in_data = False
    rows: list[list[list[float]]] = []
    row_labels: list[int] = []
    label_index: dict[str, int] = {}
    n_dims: int | None = None
    length: int | None = None
    lineno = 0

    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        if not in_data:
            if line[0] != "@":
                raise TsFormatError(f"expected a header line starting with '@', got {line[:30]!r}", lineno)
            parts = line.split()
            key = parts[0].lower()
            args = parts[1:]
            if key == "@data":
                if labels is None:
                    raise TsFormatError("@data reached without a @classLabel declaration", lineno)
                in_data = True
                if header.get("univariate") is True:
                    if header.get("dimensions", 1) != 1:
                        raise TsFormatError("@univariate true conflicts with @dimensions", lineno)
                    n_dims = 1
                elif "dimensions" in header:
                    n_dims = header["dimensions"]
                if header.get("equallength") is False:
                    raise TsFormatError("unequal-length series are not supported", lineno)
                length = header.get("serieslength")
                label_index = {lab: i for i, lab in enumerate(labels)}
                continue
            if key == "@problemname":
                if not args:
                    raise TsFormatError("@problemName needs a value", lineno)
                header["problemname"] = " ".join(args)
            elif key in ("@univariate", "@equallength", "@timestamps", "@missing"):
                if len(args) != 1:
                    raise TsFormatError(f"{parts[0]} expects one value", lineno)
                value = _parse_bool(args[0], parts[0], lineno)
                if key == "@timestamps" and value:
                    raise TsFormatError("timestamped series are not supported", lineno)
                if key == "@missing" and value:
                    raise TsFormatError("series with missing values are not supported", lineno)
                header[key[1:]] = value
            elif key in ("@dimensions", "@serieslength"):
                if len(args) != 1:
                    raise TsFormatError(f"{parts[0]} expects one value", lineno)
                header[key[1:]] = _parse_int(args[0], parts[0], lineno)
            elif key == "@classlabel":
                if not args:
                    raise TsFormatError("@classLabel expects true/false", lineno)
                if not _parse_bool(args[0], parts[0], lineno):
                    raise TsFormatError("unlabelled data (@classLabel false) is not supported", lineno)
                labels = tuple(args[1:])
                if len(labels) < 2:
                    raise TsFormatError("@classLabel must list at least two labels", lineno)
                if len(set(labels)) != len(labels):
                    raise TsFormatError(f"duplicate class labels in {labels}", lineno)
            elif key == "@targetlabel":
                raise TsFormatError("regression targets (@targetLabel) are not supported", lineno)
            else:
                warnings.warn(f"line {lineno}: skipping unknown header key {parts[0]}", stacklevel=2)
            continue

        fields = line.split(":")
        if len(fields) < 2:
            raise TsFormatError("case has no class label after ':'", lineno)
        label = fields[-1].strip()
        dims = fields[:-1]
        if n_dims is None:
            n_dims = len(dims)
        if len(dims) != n_dims:
            raise TsFormatError(f"expected {n_dims} dimensions, found {len(dims)}", lineno)
        case = []
        for dim_text in dims:
            tokens = dim_text.split(",")
            try:
                values = [float(t) for t in tokens]
            except ValueError:
                raise TsFormatError(f"non-numeric value in {dim_text[:40]!r}", lineno) from None
            if not all(math.isfinite(v) for v in values):
                raise TsFormatError("non-finite value", lineno)
            if length is None:
                length = len(values)
            if len(values) != length:
                raise TsFormatError(f"expected series length {length}, found {len(values)}", lineno)
            case.append(values)
        if label not in label_index:
            raise TsFormatError(f"unknown class label {label!r}", lineno)
        rows.append(case)
        row_labels.append(label_index[label])

    if not in_data:
        raise TsFormatError("missing @data section", lineno)
    if not rows:
        raise TsFormatError("no cases after @data", lineno)
    if length < 3:
        raise TsFormatError(f"series length {length} is below the minimum of 3", lineno)
    problem = name or header.get("problemname") or "unnamed"
    return TimeSeriesDataset(np.array(rows, dtype=np.float64), np.array(row_labels), labels, problem)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_ts(dataset: TimeSeriesDataset, stream: IO[str] | None = None) -> str:
    """Canonical ``.ts`` text for ``dataset``; also written to ``stream`` if given.

    Values use the shortest representation that reparses to the same float.
    """
    header = [f"@problemName {dataset.name}", "@timeStamps false", "@missing false"]
    if dataset.is_univariate:
        header.append("@univariate true")
    else:
        header += ["@univariate false", f"@dimensions {dataset.n_dimensions}"]
    header += [
        "@equalLength true",
        f"@seriesLength {dataset.series_length}",
        "@classLabel true " + " ".join(dataset.class_labels),
        "@data",
    ]
    body = []
    for case, label in zip(dataset.X, dataset.y):
        dims = ":".join(",".join(_fmt(v) for v in dim) for dim in case)
        body.append(f"{dims}:{dataset.class_labels[label]}")
    text = "\n".join(header + body) + "\n"
    if stream is not None:
        stream.write(text)
    return text


def load_ts(path: str | os.PathLike) -> TimeSeriesDataset:
    with open(path, encoding="utf-8") as f:
        return parse_ts(f)


def save_ts(dataset: TimeSeriesDataset, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        write_ts(dataset, f)
