"""Single experiments (one classifier, problem and resample) and suites of them."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import os
import pickle
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from hc2.bench.baseline import OneNearestNeighbour
from hc2.bench.metrics import METRICS
from hc2.bench.stats import Comparison, rank_and_clique
from hc2.core import RandomStream, TimeSeriesDataset, stratified_resample
from hc2.datasets import list_problems, load_problem
from hc2.ensemble import Deadline
from hc2.hive.components import COMPONENTS, VARIANTS, component_index, make_component, normalise_components
from hc2.hive.controller import Hc2Config, build_hc2
from hc2.io.results import RunDescriptor, atomic_write, quantise, read_results, write_results

__all__ = [
    "CLASSIFIERS",
    "ExperimentSpec",
    "ExperimentOutcome",
    "ScoreTable",
    "IncompleteResults",
    "parse_duration",
    "parse_resamples",
    "load_split",
    "train_model",
    "predict_results",
    "run_experiment",
    "run_suite",
    "score_tables",
    "compare_results",
    "write_comparison",
    "save_model",
    "load_model",
    "default_problems",
]

log = logging.getLogger(__name__)

CLASSIFIERS = tuple(VARIANTS) + COMPONENTS + ("ROCKET", "1NN-ED")


class IncompleteResults(RuntimeError):
    """Some results files needed for a comparison are missing."""


def parse_duration(text: str | float | None) -> float | None:
    """Seconds in ``"4h"``, ``"30m"``, ``"1h30m"``, ``"90s"`` or a bare number of seconds."""
    if text is None or isinstance(text, (int, float)):
        return None if text is None else float(text)
    s = text.strip().lower()
    if re.fullmatch(r"\d+(\.\d+)?", s):
        return float(s)
    m = re.fullmatch(r"(?:(\d+(?:\.\d+)?)h)?(?:(\d+(?:\.\d+)?)m)?(?:(\d+(?:\.\d+)?)s)?", s)
    if not s or not m:
        raise ValueError(f"cannot read duration {text!r}; use e.g. 4h, 30m, 1h30m or 90s")
    h, mi, se = (float(g) if g else 0.0 for g in m.groups())
    return h * 3600 + mi * 60 + se


def parse_resamples(text: str) -> list[int]:
    """``"3"``, ``"0-4"`` or ``"0,2,5"`` to a sorted list of resample indices."""
    out = set()
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part:
            a, b = (int(x) for x in part.split("-", 1))
            out.update(range(a, b + 1))
        elif part:
            out.add(int(part))
    if not out or min(out) < 0:
        raise ValueError(f"bad resample list {text!r}")
    return sorted(out)


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """One classifier, problem and resample; ``seed`` defaults to the resample index."""

    classifier: str
    problem: str
    resample: int = 0
    data_dir: str | None = None
    results_dir: str = "results"
    contract: float | None = None
    seed: int | None = None
    threads: int = 1
    components: tuple | None = None
    preset: str = "default"
    checkpoint_dir: str | None = None

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}; choose from {', '.join(CLASSIFIERS)}")
        if self.resample < 0:
            raise ValueError("resample index must be non-negative")
        if self.components is not None:
            if self.classifier != "HC2":
                raise ValueError("--components only applies to HC2")
            object.__setattr__(self, "components", normalise_components(self.components))

    @property
    def effective_seed(self) -> int:
        return self.resample if self.seed is None else self.seed

    @property
    def enabled(self) -> tuple | None:
        """Components of an HC2-style classifier, else None."""
        if self.classifier in VARIANTS:
            return self.components or VARIANTS[self.classifier]
        return None

    def _dir(self, kind: str) -> Path:
        return Path(self.results_dir) / self.classifier / kind / self.problem

    @property
    def results_path(self) -> Path:
        return self._dir("Predictions") / f"testResample{self.resample}.csv"

    @property
    def model_path(self) -> Path:
        return self._dir("Models") / f"resample{self.resample}.pkl"

    def parameters(self, digest: str) -> str:
        comps = ",".join(self.enabled) if self.enabled else "-"
        return (f"seed={self.effective_seed};preset={self.preset};contract={self.contract or 'none'};"
                f"components={comps};nll_base=2;model_sha256={digest}")


def load_split(problem: str, resample: int, data_dir: str | None = None) -> tuple[TimeSeriesDataset, TimeSeriesDataset]:
    """Train/test split for ``resample``: the archive split for 0, a stratified redraw otherwise."""
    train, test = load_problem(problem, data_dir)
    if resample == 0:
        return train, test
    return stratified_resample(TimeSeriesDataset.concatenate(train, test), train.n_cases, resample)


def train_model(spec: ExperimentSpec, train: TimeSeriesDataset, on_progress=None):
    """Fit the classifier named by ``spec`` (HC2 variants go through the controller)."""
    seed = spec.effective_seed
    if spec.enabled is not None:
        ckpt = None
        if spec.checkpoint_dir:
            ckpt = os.path.join(spec.checkpoint_dir, spec.classifier, spec.problem, f"resample{spec.resample}")
        cfg = Hc2Config(components=spec.enabled, contract=spec.contract, checkpoint_dir=ckpt,
                        seed=seed, preset=spec.preset)
        return build_hc2(train, cfg, threads=spec.threads, on_progress=on_progress)
    if spec.classifier == "1NN-ED":
        model = OneNearestNeighbour()
        stream = RandomStream(seed)
    else:
        model = make_component(spec.classifier, spec.preset)
        # ROCKET shares the Arsenal's seed child
        cid = "Arsenal" if spec.classifier == "ROCKET" else spec.classifier
        stream = RandomStream(seed).child(component_index(cid))
    return model.fit(train, stream, deadline=Deadline.after(spec.contract), threads=spec.threads)


def predict_results(spec: ExperimentSpec, model, test: TimeSeriesDataset) -> tuple[str, dict]:
    """Results-file text and the metrics computed from its quantised probabilities."""
    proba = quantise(model.predict_proba(test))
    pred = np.argmax(proba, axis=1)
    digest = hashlib.sha256(model.to_bytes()).hexdigest()
    desc = RunDescriptor(spec.problem, spec.classifier, "test", spec.resample, spec.parameters(digest),
                         model.train_accuracy)
    text = write_results(zip(test.y, pred, proba), desc)
    return text, metrics_of(test.y, proba)


def metrics_of(y, proba) -> dict:
    return {name: fn(y, proba) for name, (fn, _) in METRICS.items()}


@dataclasses.dataclass
class ExperimentOutcome:
    spec: ExperimentSpec
    path: Path
    computed: bool
    metrics: dict


def _complete(path: Path, spec: ExperimentSpec) -> dict | None:
    try:
        rf = read_results(path.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    d = rf.descriptor
    if d.classifier != spec.classifier or d.resample != spec.resample or rf.true.size == 0:
        return None
    return metrics_of(rf.true, rf.probabilities)


def run_experiment(spec: ExperimentSpec, force: bool = False) -> ExperimentOutcome:
    """Train, predict and write the results file, unless a complete one already exists."""
    path = spec.results_path
    if not force and path.exists():
        done = _complete(path, spec)
        if done is not None:
            log.info("%s exists, skipping", path)
            return ExperimentOutcome(spec, path, False, done)
    train, test = load_split(spec.problem, spec.resample, spec.data_dir)
    model = train_model(spec, train)
    text, metrics = predict_results(spec, model, test)
    atomic_write(path, text)
    return ExperimentOutcome(spec, path, True, metrics)


def save_model(spec: ExperimentSpec, model) -> Path:
    atomic_write(spec.model_path, pickle.dumps(model, protocol=4))
    return spec.model_path


def load_model(spec: ExperimentSpec):
    with open(spec.model_path, "rb") as f:
        return pickle.load(f)


def run_suite(specs, threads: int = 1, force: bool = False) -> list[ExperimentOutcome]:
    """Run independent experiments, up to ``threads`` at a time (each single-threaded inside)."""
    specs = list(specs)
    if threads <= 1 or len(specs) <= 1:
        return [run_experiment(s, force) for s in specs]
    specs = [dataclasses.replace(s, threads=1) for s in specs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: run_experiment(s, force), specs))


@dataclasses.dataclass
class ScoreTable:
    """Mean score over resamples for each (classifier, dataset)."""

    metric: str
    classifiers: list
    datasets: list
    scores: np.ndarray
    higher_is_better: bool


def score_tables(results_dir, classifiers, problems, resamples, allow_partial: bool = False) -> dict:
    """Read the results files into one :class:`ScoreTable` per metric.

    Missing files raise :class:`IncompleteResults` unless ``allow_partial``,
    in which case cells average the resamples present and datasets with an
    empty cell are dropped.
    """
    classifiers, problems = list(classifiers), list(problems)
    values = {m: np.full((len(classifiers), len(problems), len(resamples)), np.nan) for m in METRICS}
    missing = []
    for i, clf in enumerate(classifiers):
        for j, prob in enumerate(problems):
            for k, r in enumerate(resamples):
                spec = ExperimentSpec(clf, prob, r, results_dir=str(results_dir))
                got = _complete(spec.results_path, spec) if spec.results_path.exists() else None
                if got is None:
                    missing.append(str(spec.results_path))
                    continue
                for m in METRICS:
                    values[m][i, j, k] = got[m]
    if missing and not allow_partial:
        raise IncompleteResults(f"{len(missing)} results file(s) missing, e.g. {missing[0]}; "
                                "rerun the benchmark or pass --allow-partial")
    tables = {}
    for m, (_, higher) in METRICS.items():
        V = values[m]
        with np.errstate(all="ignore"):
            counts = np.sum(~np.isnan(V), axis=2)
            mean = np.where(counts > 0, np.nansum(V, axis=2) / np.maximum(counts, 1), np.nan)
        keep = [j for j in range(len(problems)) if not np.isnan(mean[:, j]).any()]
        tables[m] = ScoreTable(m, classifiers, [problems[j] for j in keep], mean[:, keep], higher)
    return tables


def compare_results(tables: dict) -> dict:
    """:class:`Comparison` per metric (metrics with fewer than two datasets are skipped)."""
    out = {}
    for m, t in tables.items():
        if len(t.datasets) >= 2 and len(t.classifiers) >= 2:
            out[m] = rank_and_clique(t.classifiers, t.scores, t.higher_is_better)
    return out


def _row(*cells) -> str:
    return ",".join(str(c) for c in cells)


def write_comparison(out_dir, tables: dict, comparisons: dict) -> list[Path]:
    """Delimiter-separated score tables, ranks, pairwise tests and cliques, one set per metric."""
    out_dir = Path(out_dir)
    written = []
    for m, t in tables.items():
        lines = [_row("dataset", *t.classifiers)]
        for j, d in enumerate(t.datasets):
            lines.append(_row(d, *(f"{v:.6f}" for v in t.scores[:, j])))
        written.append(out_dir / f"{m}_scores.csv")
        atomic_write(written[-1], "\n".join(lines) + "\n")
        cmp: Comparison | None = comparisons.get(m)
        if cmp is None:
            continue
        lines = [_row("classifier", "average_rank")]
        for name in cmp.order():
            lines.append(_row(name, f"{cmp.ranks[cmp.classifiers.index(name)]:.6f}"))
        written.append(out_dir / f"{m}_ranks.csv")
        atomic_write(written[-1], "\n".join(lines) + "\n")
        lines = [_row("classifier_a", "classifier_b", "p_value", "significant_holm_0.05")]
        lines += [_row(a, b, f"{p:.6g}", int(s)) for a, b, p, s in cmp.pairs]
        written.append(out_dir / f"{m}_pairwise.csv")
        atomic_write(written[-1], "\n".join(lines) + "\n")
        lines = [_row("clique", "members")] + [_row(i, ";".join(c)) for i, c in enumerate(cmp.cliques)]
        written.append(out_dir / f"{m}_cliques.csv")
        atomic_write(written[-1], "\n".join(lines) + "\n")
    return written


def default_problems(data_dir: str | None) -> list[str]:
    if data_dir is None:
        return list_problems()
    return sorted(p.name for p in Path(data_dir).iterdir() if p.is_dir())
