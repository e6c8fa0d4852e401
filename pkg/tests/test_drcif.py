import numpy as np
import pycatch22
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hc2.core import RandomStream, TimeSeriesDataset
from hc2.drcif.catch22 import CATCH22_NAMES, catch22_all
from hc2.drcif.features import FEATURE_NAMES, N_FEATURES, interval_features, summary_feature
from hc2.drcif.forest import (
    DrCIF,
    DrcifConfig,
    build_feature_matrix,
    n_intervals,
    representations,
    sample_tree_inputs,
)

# the periodicity feature's reference code compares spline residuals at a
# float-sensitive threshold; a few percent of random series differ there
PERIODICITY = CATCH22_NAMES.index("PD_PeriodicityWang_th0_01")
PERIODICITY_MISMATCH_RATE = 0.05


class TestSummaryFeatures:
    def test_constant_slice(self):
        s = [2.0, 2.0, 2.0, 2.0]
        assert summary_feature(0, s) == 2
        assert summary_feature(1, s) == 0
        assert summary_feature(2, s) == 0

    def test_slope(self):
        assert summary_feature(2, [0, 2, 4, 6]) == pytest.approx(2.0, abs=1e-12)

    def test_iqr_and_median(self):
        assert summary_feature(4, [1, 2, 3, 4, 5]) == pytest.approx(2.0, abs=1e-12)
        assert summary_feature(3, [5, 1, 4, 2]) == pytest.approx(3.0, abs=1e-12)

    def test_min_max_std(self):
        s = np.array([3.0, -1.0, 4.0, 1.5])
        assert summary_feature(5, s) == -1.0
        assert summary_feature(6, s) == 4.0
        assert summary_feature(1, s) == pytest.approx(np.std(s, ddof=1), rel=1e-12)

    def test_catch22_on_constant_is_zero(self):
        assert all(summary_feature(i, np.ones(20)) == 0.0 for i in range(7, N_FEATURES))

    def test_pool_size(self):
        assert N_FEATURES == 29 and len(FEATURE_NAMES) == 29

    def test_rejects_short_slices(self):
        with pytest.raises(ValueError):
            summary_feature(0, [1.0, 2.0])

    @given(st.integers(0, 2**31), st.integers(3, 40))
    def test_always_finite(self, seed, n):
        rng = np.random.default_rng(seed)
        s = rng.integers(-2, 3, n).astype(float) if seed % 2 else rng.standard_normal(n)
        assert all(np.isfinite(summary_feature(i, s)) for i in range(N_FEATURES))


def test_catch22_matches_reference_library():
    rng = np.random.default_rng(2024)
    mismatches = np.zeros(22)
    trials = 200
    for t in range(trials):
        m = int(rng.integers(10, 150))
        x = rng.standard_normal(m)
        if t % 3 == 1:
            x = x.cumsum()
        elif t % 3 == 2:
            x = np.sin(np.arange(m) / rng.uniform(1, 8)) + 0.1 * x
        ref = dict(zip(*pycatch22.catch22_all(list(x)).values()))
        ours = catch22_all(x)
        for i, name in enumerate(CATCH22_NAMES):
            a, b = ours[i], ref[name]
            same = np.isclose(a, b, rtol=1e-6, atol=1e-8) or (np.isnan(a) and np.isnan(b))
            mismatches[i] += not same
    rates = mismatches / trials
    assert rates[PERIODICITY] <= PERIODICITY_MISMATCH_RATE
    np.testing.assert_array_equal(np.delete(rates, PERIODICITY), 0.0)


class TestSampling:
    def test_interval_count(self):
        assert n_intervals(100, 1) == 7
        assert n_intervals(100, 4) == 4 + int(np.floor(2 * 10 / 3))

    @given(st.integers(0, 2**31), st.integers(12, 200), st.integers(1, 4))
    def test_bounds_and_attributes(self, seed, m, d):
        lengths = [m, m - 1, m // 2]
        sets, fids = sample_tree_inputs(lengths, d, DrcifConfig(), np.random.default_rng(seed))
        assert len(set(fids.tolist())) == 10
        for s, rm in zip(sets, lengths):
            assert len(s.starts) == n_intervals(rm, d)
            assert np.all(s.lengths >= 3) and np.all(s.lengths <= rm // 2)
            assert np.all(s.starts >= 0) and np.all(s.starts + s.lengths <= rm)
            assert np.all((0 <= s.dims) & (s.dims < d))

    def test_representation_lengths(self):
        base, diff, per = representations(np.zeros((2, 1, 21)))
        assert (base.shape[2], diff.shape[2], per.shape[2]) == (21, 20, 10)


class TestFeatureMatrix:
    def test_layout_matches_per_feature_recompute(self, toy):
        reps = representations(toy.X)
        sets, fids = sample_tree_inputs([R.shape[2] for R in reps], 1, DrcifConfig(), np.random.default_rng(5))
        F = build_feature_matrix(reps, sets, fids)
        assert F.shape == (toy.n_cases, sum(len(s.starts) for s in sets) * len(fids))
        col = 0
        for R, s in zip(reps, sets):
            for j in range(len(s.starts)):
                for f in fids:
                    sl = R[3, s.dims[j], s.starts[j]:s.starts[j] + s.lengths[j]]
                    assert F[3, col] == summary_feature(int(f), sl)
                    col += 1
        assert np.isfinite(F).all()

    def test_identical_cases_identical_rows(self):
        X = np.tile(np.random.default_rng(0).standard_normal((1, 1, 30)), (2, 1, 1))
        F = interval_features(X, [0, 0], [0, 5], [4, 10], list(range(29)))
        np.testing.assert_array_equal(F[0], F[1])


class TestForest:
    def test_single_tree_is_one_hot(self, toy):
        clf = DrCIF(DrcifConfig(n_trees=1)).fit(toy, RandomStream(0))
        p = clf.predict_proba(toy)
        assert set(np.unique(p)) <= {0.0, 1.0}
        assert len(clf.trees_) == 1

    def test_determinism_and_probabilities(self, toy_multi):
        a = DrCIF(DrcifConfig(n_trees=6)).fit(toy_multi, RandomStream(3))
        b = DrCIF(DrcifConfig(n_trees=6)).fit(toy_multi, RandomStream(3))
        assert a.to_bytes() == b.to_bytes()
        p = a.predict_proba(toy_multi)
        np.testing.assert_array_equal(p, b.predict_proba(toy_multi))
        np.testing.assert_allclose(p.sum(axis=1), 1.0)

    def test_tree_order_invariance(self, toy):
        clf = DrCIF(DrcifConfig(n_trees=5)).fit(toy, RandomStream(1))
        p = clf.predict_proba(toy)
        clf.trees_ = clf.trees_[::-1]
        np.testing.assert_allclose(clf.predict_proba(toy), p, atol=1e-15)

    def test_learns_toy(self, toy):
        clf = DrCIF(DrcifConfig(n_trees=20)).fit(toy, RandomStream(0))
        assert np.mean(clf.predict(toy) == toy.y) == 1.0
        assert 0.0 <= clf.train_accuracy <= 1.0

    def test_rejects_short_series(self):
        ds = TimeSeriesDataset(np.zeros((4, 1, 8)), [0, 1, 0, 1], ("a", "b"))
        with pytest.raises(ValueError):
            DrCIF(DrcifConfig(n_trees=1)).fit(ds, RandomStream(0))
