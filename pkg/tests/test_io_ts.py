import io
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from hc2.bench.metrics import metric_accuracy, metric_auroc, metric_nll
from hc2.core import TimeSeriesDataset
from hc2.datasets import list_problems, load_problem, problem_path
from hc2.io.results import RunDescriptor, atomic_write, quantise, read_results, write_results
from hc2.io.ts import TsFormatError, TsHeader, load_ts, parse_ts, write_ts

from conftest import FIXTURES

GOLDEN = Path(FIXTURES) / "golden"
MALFORMED = Path(FIXTURES) / "malformed"
EXPECTED_LINES = json.loads((MALFORMED / "expected_lines.json").read_text())

HEADER = "@problemName t\n@univariate true\n@equalLength true\n@seriesLength 3\n@classLabel true A B\n@data\n"


def test_minimal_file():
    ds = parse_ts(HEADER + "1,2,3:A\n4,5,6:B\n")
    assert (ds.n_cases, ds.n_dimensions, ds.series_length) == (2, 1, 3)
    assert ds.class_labels == ("A", "B")
    np.testing.assert_array_equal(ds.y, [0, 1])


def test_multivariate_delimiters():
    text = HEADER.replace("@univariate true", "@univariate false\n@dimensions 2")
    ds = parse_ts(text + "1,2,3:0.5,0.6,0.7:A\n")
    assert ds.n_dimensions == 2
    np.testing.assert_array_equal(ds.X[0], [[1, 2, 3], [0.5, 0.6, 0.7]])


def test_three_dims_written_with_two_delimiters_before_label():
    ds = TimeSeriesDataset(np.arange(18.0).reshape(2, 3, 3), [0, 1], ("A", "B"), "m3")
    body = write_ts(ds).split("@data\n")[1].splitlines()
    assert all(line.count(":") == 3 for line in body)  # two between dims, one before label
    assert not any(line.startswith("#") for line in write_ts(ds).splitlines())


def test_labels_stay_text():
    ds = parse_ts(HEADER.replace("A B", "1 2") + "1,2,3:2\n1,2,3:1\n")
    assert ds.class_labels == ("1", "2")
    np.testing.assert_array_equal(ds.y, [1, 0])


def test_comments_whitespace_and_unknown_keys():
    text = "# a comment\n@ProblemName t\n@SomethingElse 7\n" + HEADER.split("\n", 1)[1] + "\n1,2,3:A   \n\n4,5,6 :B\n"
    with pytest.warns(UserWarning, match="SomethingElse"):
        ds = parse_ts(text)
    assert ds.n_cases == 2


def test_header_invariants():
    with pytest.raises(ValueError):
        TsHeader("p", True, 2, True, 3, ("a",))
    with pytest.raises(ValueError):
        TsHeader("p", False, 2, True, 3, ("a", "a"))


@pytest.mark.parametrize("name", sorted(EXPECTED_LINES))
def test_malformed_rejected_with_line(name):
    with pytest.raises(TsFormatError) as err:
        load_ts(MALFORMED / name)
    assert err.value.line == EXPECTED_LINES[name]
    assert f"line {EXPECTED_LINES[name]}" in str(err.value)


def test_malformed_corpus_size():
    assert len(EXPECTED_LINES) == 10


@pytest.mark.parametrize("stem", ["unittest_small", "basicmotions_small", "hand_written"])
def test_golden_canonical_bytes(stem):
    first = load_ts(GOLDEN / f"{stem}.ts")
    canonical = (GOLDEN / f"{stem}.canonical.ts").read_bytes()
    assert write_ts(first).encode("utf-8") == canonical
    again = parse_ts(canonical.decode("utf-8"))
    assert again == first
    assert write_ts(again).encode("utf-8") == canonical  # canonical form is a fixpoint


@pytest.mark.parametrize("problem", list_problems())
def test_bundled_problems_round_trip(problem):
    for split in ("TRAIN", "TEST"):
        ds = load_ts(problem_path(problem, split))
        assert parse_ts(write_ts(ds)) == ds
    train, test = load_problem(problem)
    assert train.class_labels == test.class_labels


labelled = st.integers(2, 4).flatmap(
    lambda c: st.tuples(
        st.just(c),
        hnp.arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 3), st.integers(3, 8)),
                   elements=st.floats(allow_nan=False, allow_infinity=False, width=64)),
    )
)


@given(labelled, st.integers(0, 2**31))
def test_round_trip_property(case, seed):
    c, X = case
    y = np.random.default_rng(seed).integers(0, c, X.shape[0])
    ds = TimeSeriesDataset(X, y, tuple(f"L{i}" for i in range(c)), "prop")
    text = write_ts(ds)
    back = parse_ts(io.StringIO(text))
    assert back == ds
    np.testing.assert_array_equal(back.X + 0.0, ds.X + 0.0)  # bitwise up to the sign of zero
    assert write_ts(back) == text


class TestResults:
    def test_data_line_format(self):
        text = write_results([(0, 1, [0.25, 0.75])], RunDescriptor("GunPoint", "HC2", "test", 0, "seed=0"))
        lines = text.splitlines()
        assert lines[0] == "GunPoint,HC2,test,0"
        assert lines[1] == "seed=0"
        assert lines[2] == "-1"
        assert lines[3] == "0,1,,0.250000,0.750000"

    def test_train_estimate_line(self):
        text = write_results([(1, 1, [0, 1])], RunDescriptor("d", "c", train_estimate=0.8125))
        assert text.splitlines()[2] == "0.812500"

    def test_half_even(self):
        # 2^-7 and 3 * 2^-7 are exact binary ties at the seventh decimal
        assert quantise([0.0078125, 0.0234375]).tolist() == [0.007812, 0.023438]
        text = write_results([(0, 0, [0.9921875, 0.0078125])], RunDescriptor("d", "c"))
        assert text.splitlines()[3] == "0,0,,0.992188,0.007812"

    def test_rejects_invalid_distribution(self):
        with pytest.raises(ValueError):
            write_results([(0, 0, [0.6, 0.6])], RunDescriptor("d", "c"))

    @pytest.mark.parametrize("c", [3, 4, 7])
    def test_quantised_rows_accepted(self, c):
        q = quantise(np.full((1, c), 1.0 / c))
        text = write_results([(0, 0, q[0])], RunDescriptor("d", "c"))
        np.testing.assert_array_equal(read_results(text).probabilities, q)

    def test_multiline_parameters_rejected(self):
        with pytest.raises(ValueError):
            write_results([], RunDescriptor("d", "c", parameters="a\nb"))

    @given(st.integers(0, 2**31), st.integers(2, 5), st.integers(2, 30))
    def test_metrics_from_file_equal_in_memory(self, seed, c, n):
        rng = np.random.default_rng(seed)
        proba = rng.dirichlet(np.ones(c), size=n)
        q = quantise(proba)
        q[:, -1] = 1 - q[:, :-1].sum(axis=1)
        q = quantise(np.clip(q, 0, 1))
        y = rng.integers(0, c, n)
        rows = [(t, int(np.argmax(p)), p) for t, p in zip(y, q)]
        back = read_results(write_results(rows, RunDescriptor("d", "c", train_estimate=0.5)))
        np.testing.assert_array_equal(back.probabilities, q)
        np.testing.assert_array_equal(back.true, y)
        for metric in (metric_accuracy, metric_nll, metric_auroc):
            a, b = metric(y, q), metric(back.true, back.probabilities)
            assert (a == b) or (np.isnan(a) and np.isnan(b))

    def test_read_round_trip(self):
        d = RunDescriptor("ds", "clf", "test", 3, "k=v;x=y", 0.75)
        f = read_results(write_results([(0, 0, [1.0, 0.0]), (1, 0, [0.5, 0.5])], d))
        assert f.descriptor == d
        assert f.pred.tolist() == [0, 0]

    def test_atomic_write(self, tmp_path):
        p = tmp_path / "a" / "b.csv"
        atomic_write(p, "x\n")
        atomic_write(p, "y\n")
        assert p.read_text() == "y\n"
        assert [f.name for f in p.parent.iterdir()] == ["b.csv"]
