import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import make_dataset
from hc2.bench import experiment as ex
from hc2.bench.baseline import OneNearestNeighbour
from hc2.bench.cli import main
from hc2.bench.metrics import binary_auc, metric_accuracy, metric_auroc, metric_nll, midranks
from hc2.bench.stats import average_ranks, holm, rank_and_clique, wilcoxon_signed_rank
from hc2.core import RandomStream
from hc2.io.results import read_results
from hc2.io.ts import save_ts
from oracle_trials import TOLERANCE, run_trials


class TestMetrics:
    def test_perfect(self):
        y = np.array([0, 1, 2, 1])
        p = np.eye(3)[y]
        assert metric_accuracy(y, p) == 1 and metric_nll(y, p) == 0 and metric_auroc(y, p) == 1

    def test_identical_scores_half_auc(self):
        assert binary_auc(np.full(6, 0.3), np.array([1, 0, 1, 0, 0, 1], bool)) == 0.5

    def test_nll_base_two_and_clamp(self):
        y = np.array([0, 0])
        assert metric_nll(y, np.array([[0.5, 0.5], [0.25, 0.75]])) == pytest.approx(1.5)
        assert metric_nll(np.array([1]), np.array([[1.0, 0.0]])) == pytest.approx(-math.log2(1e-16))

    def test_accuracy_ties_lowest_index(self):
        assert metric_accuracy(np.array([0]), np.array([[0.5, 0.5]])) == 1.0

    def test_eight_case_multiclass_oracle(self):
        rng = np.random.default_rng(8)
        y = np.array([0, 1, 2, 0, 1, 2, 0, 0])
        p = rng.dirichlet(np.ones(3), 8)
        assert metric_auroc(y, p) == pytest.approx(oracles.pair_counting_auroc(y, p), abs=1e-12)

    def test_auroc_oracle_trials(self):
        assert run_trials("auroc", 100, seed=1) <= TOLERANCE

    def test_absent_class_skipped(self, caplog):
        y = np.array([0, 1, 0, 1])
        p = np.array([[0.6, 0.3, 0.1], [0.2, 0.7, 0.1], [0.5, 0.4, 0.1], [0.3, 0.3, 0.4]])
        with caplog.at_level("INFO"):
            got = metric_auroc(y, p)
        assert got == pytest.approx(oracles.pair_counting_auroc(y, p))
        assert any("absent" in r.getMessage() for r in caplog.records)

    def test_midranks(self):
        np.testing.assert_array_equal(midranks([3, 1, 3, 2]), [3.5, 1, 3.5, 2])


class TestWilcoxon:
    def test_identical_vectors(self):
        assert wilcoxon_signed_rank([1, 2, 3], [1, 2, 3]) == 1.0

    def test_six_strictly_better(self):
        a = np.array([0.9, 0.8, 0.85, 0.7, 0.95, 0.6])
        assert wilcoxon_signed_rank(a, a - np.arange(1, 7) / 100) == pytest.approx(2 / 2 ** 6, abs=1e-15)

    def test_ten_random_pairs_brute(self):
        rng = np.random.default_rng(10)
        a, b = rng.random(10), rng.random(10)
        assert wilcoxon_signed_rank(a, b) == pytest.approx(oracles.brute_wilcoxon(a, b), abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_brute_force_all_sizes(self, n):
        rng = np.random.default_rng(n)
        for _ in range(5):
            a = rng.integers(0, 4, n).astype(float)
            b = rng.integers(0, 4, n).astype(float)
            assert wilcoxon_signed_rank(a, b) == pytest.approx(oracles.brute_wilcoxon(a, b), abs=1e-12)

    def test_oracle_trials(self):
        assert run_trials("wilcoxon_exact", 100, seed=2) <= TOLERANCE

    def test_normal_approximation_beyond_twenty(self):
        rng = np.random.default_rng(0)
        a = rng.random(40)
        p = wilcoxon_signed_rank(a + 0.05, a - rng.random(40) * 0.01)
        assert 0 <= p < 1e-5
        assert wilcoxon_signed_rank(a, a[::-1]) > 0.05


class TestRanks:
    def test_holm(self):
        np.testing.assert_array_equal(holm([0.01, 0.04, 0.03, 0.005]), [True, False, False, True])
        np.testing.assert_array_equal(holm([0.2, 0.01]), [False, True])

    def test_hand_ranked(self):
        # 2 classifiers on 3 datasets: A wins twice, tie once
        S = np.array([[0.9, 0.8, 0.5], [0.7, 0.8, 0.4]])
        np.testing.assert_allclose(average_ranks(S), [(1 + 1.5 + 1) / 3, (2 + 1.5 + 2) / 3])
        np.testing.assert_allclose(average_ranks(S, higher_is_better=False), [(2 + 1.5 + 2) / 3, (1 + 1.5 + 1) / 3])

    def test_identical_classifiers_one_clique(self):
        S = np.array([[0.9, 0.8, 0.7, 0.6], [0.9, 0.8, 0.7, 0.6]])
        cmp = rank_and_clique(["a", "b"], S)
        assert cmp.ranks[0] == cmp.ranks[1] and cmp.cliques == [("a", "b")]

    @given(st.integers(0, 2**31), st.integers(2, 5), st.integers(2, 12))
    def test_rank_sums_and_order_invariance(self, seed, k, D):
        rng = np.random.default_rng(seed)
        S = np.round(rng.random((k, D)), 2)
        ranks = average_ranks(S)
        assert ranks.sum() * 1 == pytest.approx(k * (k + 1) / 2)
        names = [f"c{i}" for i in range(k)]
        base = rank_and_clique(names, S)
        perm = rng.permutation(k)
        other = rank_and_clique([names[i] for i in perm], S[perm])
        assert sorted(base.cliques) == sorted(other.cliques)
        assert dict(zip(base.classifiers, base.ranks)) == pytest.approx(dict(zip(other.classifiers, other.ranks)))

    def test_clear_winner_separates(self):
        rng = np.random.default_rng(3)
        base = rng.random(25)
        S = np.vstack([base + 0.2, base + 0.19, base])
        cmp = rank_and_clique(["best", "close", "worst"], S)
        assert cmp.order() == ["best", "close", "worst"]
        assert ("close", "worst") not in [c[-2:] for c in cmp.cliques if "worst" in c]
        assert all("worst" not in c for c in cmp.cliques)

    def test_missing_entries_rejected(self):
        with pytest.raises(ValueError):
            average_ranks(np.array([[0.5, np.nan], [0.4, 0.3]]))
        with pytest.raises(ValueError):
            rank_and_clique(["a", "b"], np.array([[0.5], [0.4]]))


def test_one_nearest_neighbour(toy):
    clf = OneNearestNeighbour().fit(toy, RandomStream(0))
    assert np.all(clf.predict(toy) == toy.y)
    X = toy.X
    d = ((X[:, None] - X[None]) ** 2).sum(axis=(2, 3))
    np.fill_diagonal(d, np.inf)
    assert clf.train_accuracy == np.mean(toy.y[np.argmin(d, axis=1)] == toy.y)


def test_parsers():
    assert ex.parse_duration("4h") == 14400 and ex.parse_duration("1h30m") == 5400
    assert ex.parse_duration("90s") == 90 and ex.parse_duration("2m") == 120 and ex.parse_duration(None) is None
    assert ex.parse_resamples("0-4") == [0, 1, 2, 3, 4] and ex.parse_resamples("0,2") == [0, 2]
    with pytest.raises(ValueError):
        ex.parse_duration("soon")


@pytest.fixture()
def archive(tmp_path):
    """Three tiny problems laid out like the archive."""
    root = tmp_path / "data"
    for k, name in enumerate(["Alpha", "Beta", "Gamma"]):
        ds = make_dataset(n=24, m=20, seed=k, name=name, signal=1.5 + k)
        (root / name).mkdir(parents=True)
        save_ts(ds.subset(range(12)), root / name / f"{name}_TRAIN.ts")
        save_ts(ds.subset(range(12, 24)), root / name / f"{name}_TEST.ts")
    return root


class TestExperiments:
    def test_seed_and_paths(self, tmp_path):
        spec = ex.ExperimentSpec("HC2", "GunPoint", 3, results_dir=str(tmp_path))
        assert spec.effective_seed == 3
        assert spec.results_path == tmp_path / "HC2" / "Predictions" / "GunPoint" / "testResample3.csv"
        with pytest.raises(ValueError):
            ex.ExperimentSpec("TDE", "x", components=("tde",))
        with pytest.raises(ValueError):
            ex.ExperimentSpec("HC3", "x")

    def test_resample_zero_is_default_split(self, archive):
        from hc2.datasets import load_problem
        train, test = ex.load_split("Alpha", 0, str(archive))
        assert train == load_problem("Alpha", str(archive))[0]
        t1, _ = ex.load_split("Alpha", 1, str(archive))
        assert np.array_equal(np.bincount(t1.y), np.bincount(train.y)) and t1 != train

    def test_idempotent_and_file_fidelity(self, archive, tmp_path):
        spec = ex.ExperimentSpec("1NN-ED", "Beta", 1, data_dir=str(archive), results_dir=str(tmp_path / "r"))
        first = ex.run_experiment(spec)
        text = spec.results_path.read_text()
        mtime = spec.results_path.stat().st_mtime_ns
        again = ex.run_experiment(spec)
        assert first.computed and not again.computed
        assert spec.results_path.read_text() == text and spec.results_path.stat().st_mtime_ns == mtime
        assert again.metrics == first.metrics
        rf = read_results(text)
        assert rf.descriptor.dataset == "Beta" and rf.descriptor.resample == 1
        assert "nll_base=2" in rf.descriptor.parameters
        assert rf.descriptor.train_estimate is not None
        np.testing.assert_array_equal(rf.pred, np.argmax(rf.probabilities, axis=1))

    def test_suite_accounting_and_partial_refusal(self, archive, tmp_path):
        res = tmp_path / "r"
        specs = [ex.ExperimentSpec(c, p, r, data_dir=str(archive), results_dir=str(res), preset="desk")
                 for c in ("1NN-ED", "Arsenal") for p in ("Alpha", "Beta", "Gamma") for r in (0, 1)]
        outcomes = ex.run_suite(specs, threads=2)
        assert len(list(res.rglob("testResample*.csv"))) == 12
        tables = ex.score_tables(res, ["1NN-ED", "Arsenal"], ["Alpha", "Beta", "Gamma"], [0, 1])
        assert tables["accuracy"].scores.shape == (2, 3)
        for o in outcomes:
            i = ["1NN-ED", "Arsenal"].index(o.spec.classifier)
            j = ["Alpha", "Beta", "Gamma"].index(o.spec.problem)
            pair = [q.metrics["accuracy"] for q in outcomes if q.spec.classifier == o.spec.classifier
                    and q.spec.problem == o.spec.problem]
            assert tables["accuracy"].scores[i, j] == pytest.approx(np.mean(pair), abs=1e-12)
        written = ex.write_comparison(res / "comparison", tables, ex.compare_results(tables))
        assert {p.name for p in written} >= {"accuracy_scores.csv", "accuracy_ranks.csv",
                                             "accuracy_pairwise.csv", "accuracy_cliques.csv"}
        with pytest.raises(ex.IncompleteResults):
            ex.score_tables(res, ["1NN-ED", "Arsenal"], ["Alpha", "Beta", "Gamma"], [0, 1, 2])
        partial = ex.score_tables(res, ["1NN-ED", "Arsenal", "TDE"], ["Alpha", "Beta"], [0], allow_partial=True)
        assert partial["accuracy"].datasets == []

    def test_threads_leave_results_unchanged(self, archive, tmp_path):
        texts = []
        for threads, d in ((1, "a"), (3, "b")):
            spec = ex.ExperimentSpec("Arsenal", "Gamma", 0, data_dir=str(archive), results_dir=str(tmp_path / d),
                                     preset="desk", threads=threads)
            ex.run_experiment(spec)
            texts.append(spec.results_path.read_text())
        assert texts[0] == texts[1]


class TestCli:
    def test_train_predict(self, archive, tmp_path, capsys):
        common = ["--data-dir", str(archive), "--results-dir", str(tmp_path), "--problem", "Alpha",
                  "--classifier", "1NN-ED", "--resample", "1"]
        assert main(["predict", *common]) == 2
        assert main(["train", *common]) == 0
        assert "model sha256" in capsys.readouterr().out
        assert main(["predict", *common]) == 0
        out = capsys.readouterr().out
        assert "accuracy" in out
        assert (tmp_path / "1NN-ED" / "Predictions" / "Alpha" / "testResample1.csv").exists()

    def test_benchmark_and_compare(self, archive, tmp_path, capsys):
        base = ["--data-dir", str(archive), "--results-dir", str(tmp_path), "--preset", "desk"]
        args = [*base, "--classifier", "1NN-ED,Arsenal", "--problem", "Alpha,Beta", "--resample", "0"]
        assert main(["compare", *args]) == 3
        assert main(["benchmark", *args, "--components", "arsenal"]) == 2
        capsys.readouterr()
        assert main(["benchmark", *args, "--threads", "2"]) == 0
        out = capsys.readouterr().out
        assert "average accuracy rank" in out
        assert (tmp_path / "comparison" / "accuracy_ranks.csv").exists()
        assert main(["benchmark", *args]) == 0
        assert capsys.readouterr().out.count("kept") == 4
        assert main(["compare", *args]) == 0

    def test_bad_input_exit_code(self, tmp_path, capsys):
        assert main(["train", "--problem", "Nope", "--classifier", "1NN-ED", "--results-dir", str(tmp_path),
                     "--data-dir", str(tmp_path), "--contract", "later"]) == 2
