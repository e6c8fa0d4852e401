import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hc2.core import TimeSeriesDataset
from hc2.datasets import load_problem

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def make_dataset(n=20, d=1, m=30, c=2, seed=0, signal=2.0, name="toy"):
    """Random series with a class-dependent bump, so every classifier has something to find."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % c
    X = rng.standard_normal((n, d, m))
    t = np.arange(m)
    for i in range(n):
        centre = (y[i] + 1) * m / (c + 1)
        X[i, :, :] += signal * np.exp(-0.5 * ((t - centre) / max(1.0, m / 10)) ** 2)
    return TimeSeriesDataset(X, y, tuple(f"c{k}" for k in range(c)), name)


@pytest.fixture(scope="session")
def toy():
    return make_dataset()


@pytest.fixture(scope="session")
def toy_multi():
    return make_dataset(n=16, d=3, m=24, c=2, seed=1)


@pytest.fixture(scope="session")
def unit_test_problem():
    return load_problem("UnitTest")


def tiny_overrides():
    """Component configurations small enough for unit tests."""
    from hc2.arsenal.ensemble import ArsenalConfig
    from hc2.drcif.forest import DrcifConfig
    from hc2.stc.classifier import StcConfig
    from hc2.tde.ensemble import TdeConfig

    return (
        ("TDE", TdeConfig(n_parameter_samples=5, max_ensemble_size=3, n_random=4)),
        ("DrCIF", DrcifConfig(n_trees=5)),
        ("Arsenal", ArsenalConfig(n_members=3, n_kernels=60)),
        ("STC", StcConfig(n_candidates=60, n_trees=5)),
    )


# Acceptance verdicts: tests marked ``criterion(n, title)`` report one line each
# in the terminal summary, whatever the phase that decided them.
_VERDICTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.skipped:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        n, title = marker.args
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        _VERDICTS[n] = f"{'PASS' if rep.passed else 'FAIL'} criterion {n}: {title}" + (f" ({detail})" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[n])
