"""HIVE-COTE 2.0 controller: builds the components, checkpoints progress and combines their votes."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import os
import time
from typing import Callable

import numpy as np

from hc2.core import RandomStream, TimeSeriesDataset
from hc2.ensemble import BuildInterrupted, Deadline, OutOfBagEstimate, canonical_bytes
from hc2.hive.checkpoint import FILENAME, Checkpoint
from hc2.hive.combine import combine
from hc2.hive.components import COMPONENTS, component_config, component_index, make_component, normalise_components

__all__ = ["Hc2Config", "ComponentReport", "Hc2Model", "build_hc2", "predict_hc2", "component_stream"]

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Hc2Config:
    """Controller settings.

    Parameters
    ----------
    alpha : float
        Tilt exponent applied to the component train estimates.
    components : tuple of str
        Enabled components.
    contract : float, optional
        Total train time in seconds, shared equally by the components still
        to be built.
    checkpoint_dir : str, optional
        Where ``hc2.ckpt`` is written and resumed from.
    seed : int
        Root seed; component ``i`` (registry order) uses child ``i``.
    preset : str
        Component configuration preset, ``"default"`` or ``"desk"``.
    overrides : tuple of (str, config) pairs
        Per-component configurations replacing the preset.
    checkpoint_interval : float
        Minimum seconds between periodic in-component checkpoints.
    """

    alpha: float = 4.0
    components: tuple = COMPONENTS
    contract: float | None = None
    checkpoint_dir: str | None = None
    seed: int = 0
    preset: str = "default"
    overrides: tuple = ()
    checkpoint_interval: float = 60.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        object.__setattr__(self, "components", normalise_components(self.components))
        if self.contract is not None and self.contract <= 0:
            raise ValueError("the contract must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def component_config(self, cid: str):
        for name, cfg in self.overrides:
            if name == cid:
                return cfg
        return component_config(cid, self.preset)

    def digest(self) -> str:
        """Hash of everything that shapes the model (not threads or paths)."""
        key = repr((self.alpha, self.components, self.contract, self.seed,
                    [(c, self.component_config(c)) for c in self.components]))
        return hashlib.sha256(key.encode()).hexdigest()


@dataclasses.dataclass
class ComponentReport:
    component_id: str
    ok: bool
    train_accuracy: float | None = None
    build_time: float = 0.0
    resubstitution: bool = False
    message: str = ""


def component_stream(seed: int, cid: str) -> RandomStream:
    """The stream a component draws from, inside HC2 or standalone."""
    return RandomStream(seed).child(component_index(cid))


class Hc2Model:
    """Fitted components and their tilted combination."""

    def __init__(self, config: Hc2Config, components: dict, reports: list, n_classes: int):
        self.config = config
        self.components = components
        self.reports = reports
        self.n_classes = n_classes
        self.train_estimate_: OutOfBagEstimate | None = None

    @property
    def estimates(self) -> list[float]:
        return [m.train_accuracy for m in self.components.values()]

    def component_probabilities(self, data) -> dict:
        return {cid: m.predict_proba(data) for cid, m in self.components.items()}

    def predict_proba(self, data) -> np.ndarray:
        dists = self.component_probabilities(data)
        return combine(list(dists.values()), self.estimates, self.config.alpha)

    def predict(self, data) -> np.ndarray:
        return np.argmax(self.predict_proba(data), axis=1)

    @property
    def train_accuracy(self) -> float:
        return self.train_estimate_.accuracy

    def to_bytes(self) -> bytes:
        """Canonical bytes of the fitted components; timings and reports are left out."""
        return canonical_bytes({
            "alpha": self.config.alpha,
            "components": [(cid, m.to_bytes()) for cid, m in self.components.items()],
            "train_estimate": self.train_estimate_,
        })


def combined_train_estimate(components: dict, y: np.ndarray, n_classes: int, alpha: float) -> OutOfBagEstimate:
    """Tilted combination of the components' out-of-bag distributions.

    Each case combines only the components that have an out-of-bag
    distribution for it; cases no component covers are left out.
    """
    n = y.shape[0]
    proba = np.full((n, n_classes), np.nan)
    ests = [m.train_accuracy for m in components.values()]
    oobs = [m.train_estimate_.proba for m in components.values()]
    for i in range(n):
        parts = [(p[i], e) for p, e in zip(oobs, ests) if not np.isnan(p[i, 0])]
        if parts:
            proba[i] = combine([p for p, _ in parts], [e for _, e in parts], alpha)
    covered = ~np.isnan(proba[:, 0])
    if covered.any():
        acc = float(np.mean(np.argmax(proba[covered], axis=1) == y[covered]))
        return OutOfBagEstimate(proba, covered, acc)
    # nothing covered anywhere: weight the components' own (resubstitution) estimates
    w = np.array(ests) ** alpha
    acc = float(np.dot(w, ests) / w.sum()) if w.sum() > 0 else float(np.mean(ests))
    return OutOfBagEstimate(proba, covered, acc, resubstitution=True)


def build_hc2(
    train: TimeSeriesDataset,
    config: Hc2Config | None = None,
    *,
    threads: int = 1,
    on_progress: Callable[[str, dict | None], None] | None = None,
) -> Hc2Model:
    """Train every enabled component and assemble the meta-ensemble.

    Components are built one after another, each on its own seed child and
    with internal parallelism over ``threads``. With ``checkpoint_dir`` set a
    checkpoint is written after every component, periodically inside a
    component, and whenever the build is interrupted; an existing checkpoint
    with the same configuration is resumed. ``on_progress(component, state)``
    sees every resumable step (``state`` is None once a component is done);
    raising :class:`BuildInterrupted` from it stops the build.
    """
    config = config or Hc2Config()
    path = os.path.join(config.checkpoint_dir, FILENAME) if config.checkpoint_dir else None
    digest = config.digest()
    if path and os.path.exists(path):
        ckpt = Checkpoint.load(path, digest)
        log.info("resuming from %s", path)
    else:
        ckpt = Checkpoint(digest)

    total = Deadline.after(config.contract)
    fitted, reports = {}, []
    last_save = [time.monotonic()]

    def save():
        if path:
            ckpt.save(path)
            last_save[0] = time.monotonic()

    todo = list(config.components)
    for k, cid in enumerate(todo):
        entry = ckpt.entries.get(cid)
        if entry is not None and entry.status == "done":
            model = entry.value()
            fitted[cid] = model
            reports.append(ComponentReport(cid, True, model.train_accuracy, 0.0,
                                           model.train_estimate_.resubstitution, "restored"))
            continue
        if entry is not None and entry.status == "failed":
            reports.append(ComponentReport(cid, False, message=entry.message))
            continue
        state = entry.value() if entry is not None else {}
        if total.unlimited:
            deadline = Deadline()
        else:
            deadline = Deadline.after(max(0.0, total.remaining()) / (len(todo) - k))

        def progress(st, cid=cid):
            if on_progress is not None:
                on_progress(cid, st)
            if path and time.monotonic() - last_save[0] >= config.checkpoint_interval:
                ckpt.put(cid, "partial", st)
                save()

        model = make_component(cid, config=config.component_config(cid))
        t0 = time.perf_counter()
        try:
            model.fit(train, component_stream(config.seed, cid), deadline=deadline, threads=threads,
                      state=state, on_progress=progress)
        except BuildInterrupted:
            ckpt.put(cid, "partial", state)
            save()
            raise
        except Exception as exc:  # noqa: BLE001 - a failing component is excluded, not fatal
            msg = f"{type(exc).__name__}: {exc}"
            log.warning("%s failed and is excluded: %s", cid, msg)
            reports.append(ComponentReport(cid, False, build_time=time.perf_counter() - t0, message=msg))
            ckpt.put(cid, "failed", None, msg)
            save()
            continue
        took = time.perf_counter() - t0
        fitted[cid] = model
        reports.append(ComponentReport(cid, True, model.train_accuracy, took,
                                       model.train_estimate_.resubstitution))
        ckpt.put(cid, "done", model)
        save()
        if on_progress is not None:
            on_progress(cid, None)

    if not fitted:
        raise RuntimeError("every component failed: " + "; ".join(r.message for r in reports))
    hc2 = Hc2Model(config, fitted, reports, train.n_classes)
    hc2.train_estimate_ = combined_train_estimate(fitted, train.y, train.n_classes, config.alpha)
    return hc2


def predict_hc2(model: Hc2Model, data) -> np.ndarray:
    """Combined class distribution for one case ``(d, m)`` or a batch ``(n, d, m)``."""
    X = data.X if isinstance(data, TimeSeriesDataset) else np.asarray(data, dtype=np.float64)
    if X.ndim == 2:
        return model.predict_proba(X[None])[0]
    return model.predict_proba(X)
