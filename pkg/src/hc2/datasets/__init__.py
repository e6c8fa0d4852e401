"""Small UCR/UEA problems bundled for tests and desk-scale benchmarks."""

from __future__ import annotations

from pathlib import Path

from hc2.core import TimeSeriesDataset
from hc2.io.ts import load_ts

DATA_DIR = Path(__file__).parent / "data"

__all__ = ["DATA_DIR", "list_problems", "load_problem", "problem_path"]


def list_problems() -> list[str]:
    return sorted(p.name for p in DATA_DIR.iterdir() if p.is_dir())


def problem_path(problem: str, split: str, data_dir: str | Path | None = None) -> Path:
    root = Path(data_dir) if data_dir is not None else DATA_DIR
    return root / problem / f"{problem}_{split.upper()}.ts"


def load_problem(problem: str, data_dir: str | Path | None = None) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    """The default ``(train, test)`` split of ``problem``."""
    train = load_ts(problem_path(problem, "train", data_dir))
    test = load_ts(problem_path(problem, "test", data_dir))
    if train.class_labels != test.class_labels:
        raise ValueError(f"{problem}: train and test declare different class labels")
    return train, test
