from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hc2.core import RandomStream, TimeSeriesDataset
from hc2.ensemble import vote_distribution
from hc2.tde.ensemble import (
    TDE,
    TdeConfig,
    TdeParameters,
    build_individual_tde,
    encode_parameters,
    gp_posterior_mean,
    gp_propose_parameters,
    parameter_pool,
    select_dimensions,
    select_from_accuracies,
)
from hc2.tde.histogram import (
    BagSet,
    case_histogram,
    histogram_similarity,
    loocv_accuracy,
    similarity_matrix,
)
from hc2.tde.sfa import (
    fit_breakpoints,
    mcb_breakpoints,
    sfa_coefficients,
    sfa_word,
    unpack_word,
    window_coefficients,
)
from oracle_trials import TOLERANCE, run_trials


class TestCoefficients:
    def test_constant_normalised_is_zero(self):
        np.testing.assert_array_equal(sfa_coefficients(np.full(12, 3.0), 8, True), np.zeros(8))

    def test_constant_raw_is_dc_only(self):
        c = sfa_coefficients(np.full(12, 3.0), 8, False)
        assert c[0] == pytest.approx(36.0) and abs(c[1]) < 1e-12
        np.testing.assert_allclose(c[2:], 0, atol=1e-12)

    def test_random_window_l8(self):
        x = np.random.default_rng(4).standard_normal(16)
        for norm in (True, False):
            np.testing.assert_allclose(sfa_coefficients(x, 8, norm), oracles.naive_sfa(x, 8, norm), atol=1e-9)

    def test_oracle_trials(self):
        assert run_trials("sfa_coefficients", 60, seed=3) <= TOLERANCE

    def test_sliding_equals_per_window(self):
        x = np.random.default_rng(0).standard_normal(30)
        W = window_coefficients(x, 10, 6, True)
        assert W.shape == (21, 6)
        for j in (0, 7, 20):
            np.testing.assert_array_equal(W[j], sfa_coefficients(x[j:j + 10], 6, True))
        np.testing.assert_array_equal(window_coefficients(x, 10, 6, True, stride=10), W[[0, 10, 20]])


class TestBreakpoints:
    def test_mcb_quantiles(self):
        bp = mcb_breakpoints(np.arange(1.0, 9.0)[:, None])
        np.testing.assert_allclose(bp[0], [2.75, 4.5, 6.25])

    def test_mcb_constant_maps_to_top_letter(self):
        bp = fit_breakpoints("MCB", np.full((10, 2), 1.5))
        np.testing.assert_array_equal(bp, 1.5)
        assert unpack_word(sfa_word([1.5, 1.5], bp), 2) == [3, 3]

    def test_igb_separated_labels(self):
        v = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        bp = fit_breakpoints("IGB", v, y, 2)
        # the dominant split sits between the classes at the midpoint 6
        assert bp[0, 1] == pytest.approx(6.0)
        assert np.all(np.diff(bp[0]) >= 0)

    def test_igb_root_matches_exhaustive(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            v = rng.standard_normal((12, 1))
            y = rng.integers(0, 2, 12)
            gain, col, thr = oracles.brute_root_split(v, y, 2) or (0, 0, None)
            bp = fit_breakpoints("IGB", v, y, 2)
            if gain > 1e-12:
                assert bp[0, 1] == pytest.approx(thr, abs=1e-12)

    @given(st.integers(0, 2**31))
    def test_rows_non_decreasing(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.integers(0, 4, size=(20, 4)).astype(float)
        y = rng.integers(0, 3, 20)
        for method in ("MCB", "IGB"):
            assert np.all(np.diff(fit_breakpoints(method, v, y, 3), axis=1) >= 0)

    def test_too_few_values(self):
        with pytest.raises(ValueError):
            fit_breakpoints("MCB", np.zeros((3, 2)))


class TestWords:
    BP = np.array([[1.0, 2.0, 3.0]] * 4)

    def test_all_low_and_all_high(self):
        assert sfa_word([0, 0, 0, 0], self.BP) == 0
        assert unpack_word(sfa_word([9, 9, 9, 9], self.BP), 4) == [3, 3, 3, 3]

    def test_equal_to_threshold_goes_up(self):
        assert unpack_word(sfa_word([2.0, 0, 0, 0], self.BP), 4)[0] == 2

    def test_first_coefficient_most_significant(self):
        assert sfa_word([9, 0, 0, 0], self.BP) == 3 * 4 ** 3


class TestHistograms:
    def test_numerosity_reduction(self):
        words = np.zeros((1, 21), dtype=np.int64)  # m=30, w=10: every window the same word
        h = case_histogram(words, 30, 10, levels=3, bigrams=False)
        assert h.total(level=1) == 1 and h.total(level=2) == 1 and h.total(level=3) == 1

    def test_level_one_count_bound(self):
        rng = np.random.default_rng(0)
        words = rng.integers(0, 3, (1, 21))
        h = case_histogram(words, 30, 10, 1, False)
        changes = 1 + int(np.sum(words[0, 1:] != words[0, :-1]))
        assert h.total(level=1) == changes <= 21

    def test_bigram_counted_once(self):
        m, w = 14, 3
        words = np.full((1, m - w + 1), 5, dtype=np.int64)
        words[0, 3:] = 7  # r1=5 at j=0, r2=7 first appears at j=3=w, then repeats
        h = case_histogram(words, m, w, 1, True)
        assert h.total(bigrams=True) == 1
        assert list(h.as_dict().values()).count(1) >= 1

    def test_pyramid_accounting(self):
        words = np.arange(11, dtype=np.int64)[None, :]  # all distinct
        h = case_histogram(words, 20, 10, 3, False)
        assert sum(h.counts) == 3 * 11
        # level-3 has 4 buckets of the defined width
        pos = sorted({hh & 0xFFFFFFFF for hh in h.hi if (hh >> 32) & 0xFF == 3})
        assert pos == [0, 1, 2, 3]
        np.testing.assert_array_equal(np.unique(h.weights), [1.0, 2.0, 4.0])

    def test_similarity_basics(self):
        a = case_histogram(np.array([[1, 2, 3, 4]]), 8, 5, 1, False)
        b = case_histogram(np.array([[5, 6, 7, 8]]), 8, 5, 1, False)
        assert histogram_similarity(a, a) == 4
        assert histogram_similarity(a, b) == 0

    @given(st.integers(0, 2**31))
    def test_symmetric_non_negative(self, seed):
        rng = np.random.default_rng(seed)
        make = lambda: case_histogram(rng.integers(0, 4, (2, 11)), 20, 10, 2, False)
        a, b = make(), make()
        s = histogram_similarity(a, b)
        assert s == histogram_similarity(b, a) >= 0

    def test_similarity_and_loocv_oracles(self):
        assert run_trials("tde_loocv", 60, seed=5) <= TOLERANCE

    def test_loocv_examples(self):
        a = case_histogram(np.array([[1, 2, 3]]), 7, 5, 1, False)
        b = case_histogram(np.array([[4, 5, 6]]), 7, 5, 1, False)
        assert loocv_accuracy(similarity_matrix(BagSet.pack([a, b])), np.array([0, 1])) == 0.0
        sim = similarity_matrix(BagSet.pack([a, a, b, b]))
        assert loocv_accuracy(sim, np.array([0, 0, 1, 1])) == 1.0


class TestDimensionSelection:
    def test_threshold_arithmetic(self):
        assert select_from_accuracies([0.9, 0.8, 0.5]) == [0, 1]

    def test_cap_prefers_lowest_indices(self):
        assert select_from_accuracies(np.full(30, 0.7)) == list(range(20))

    def test_univariate_shortcut(self, toy):
        dims, accs = select_dimensions(toy.X, toy.y, TdeParameters(8, 10, True, 1, "MCB"), 2)
        assert dims == [0] and accs is None

    def test_multivariate_retains_informative(self, toy_multi):
        dims, accs = select_dimensions(toy_multi.X, toy_multi.y, TdeParameters(8, 10, True, 1, "MCB"), 2)
        assert 1 <= len(dims) <= 3 and accs.shape == (3,)


class TestGaussianProcess:
    def test_posterior_mean_matches_direct_solve(self):
        rng = np.random.default_rng(0)
        hx, hy, q = rng.random((8, 6)), rng.random(8), rng.random((5, 6))
        k = lambda a, b: np.exp(-0.5 * ((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
        direct = k(q, hx) @ np.linalg.solve(k(hx, hx) + 0.01 * np.eye(8), hy)
        np.testing.assert_allclose(gp_posterior_mean(hx, hy, q), direct, atol=1e-10)

    def test_increasing_in_window_proposes_largest_window(self):
        pool = parameter_pool(30)
        enc = encode_parameters(pool)
        rng = np.random.default_rng(1)
        hist = rng.choice(len(pool), 50, replace=False)
        hy = np.array([pool[i].window for i in hist], dtype=float) / 30
        remaining = np.setdiff1d(np.arange(len(pool)), hist)
        remaining = remaining[[pool[i].window <= 25 for i in remaining]]
        pick = remaining[gp_propose_parameters(enc[hist], hy, enc[remaining])]
        assert pool[pick].window == max(pool[i].window for i in remaining)

    def test_duplicate_candidates_pick_first(self):
        hx = np.array([[0.0], [1.0]])
        assert gp_propose_parameters(hx, np.array([0.1, 0.9]), np.array([[1.0], [1.0], [0.0]])) == 0

    def test_pool_and_encoding(self):
        pool = parameter_pool(12)
        assert len(pool) == 5 * 3 * 2 * 3 * 2
        enc = encode_parameters(pool)
        assert enc.shape == (len(pool), 6) and enc.min() >= 0 and enc.max() <= 1
        np.testing.assert_array_equal(enc[:, 3], 0)  # alphabet size is constant


class TestEnsemble:
    def test_retention_and_weights(self):
        tde = TDE(TdeConfig(max_ensemble_size=2))
        members = []
        for acc in (0.5, 0.6, 0.9):
            tde._retain(members, SimpleNamespace(accuracy=acc))
        assert sorted(m.accuracy for m in members) == [0.6, 0.9]

    def test_weighted_vote_arithmetic(self):
        p = vote_distribution(np.array([[0], [1]]), np.array([0.9 ** 4, 0.6 ** 4]), 2)[0]
        np.testing.assert_allclose(p, [0.835, 0.165], atol=1e-3)
        np.testing.assert_allclose(vote_distribution(np.array([[0], [1]]), np.ones(2), 2)[0], [0.5, 0.5])

    def test_k_below_s(self, toy):
        clf = TDE(TdeConfig(n_parameter_samples=5, max_ensemble_size=50, n_random=5)).fit(toy, RandomStream(0))
        assert len(clf.members_) == 5
        np.testing.assert_array_equal(clf.weights_, [m.accuracy ** 4 for m in clf.members_])

    def test_stored_accuracy_recomputes(self, toy):
        clf = TDE(TdeConfig(6, 3, n_random=4)).fit(toy, RandomStream(2))
        assert len(clf.members_) == 3
        for m in clf.members_:
            assert m.recompute_accuracy() == m.accuracy
            assert len(m.subsample) == 14  # 70% of each class of 10

    def test_determinism(self, toy):
        cfg = TdeConfig(6, 4, n_random=3)
        a = TDE(cfg).fit(toy, RandomStream(7))
        b = TDE(cfg).fit(toy, RandomStream(7))
        assert a.to_bytes() == b.to_bytes()
        np.testing.assert_allclose(a.predict_proba(toy).sum(axis=1), 1.0)

    def test_single_member_one_hot(self, toy):
        clf = TDE(TdeConfig(1, 1, n_random=1)).fit(toy, RandomStream(0))
        assert set(np.unique(clf.predict_proba(toy))) <= {0.0, 1.0}

    def test_multivariate_has_no_bigrams(self, toy_multi):
        member = build_individual_tde(toy_multi.X, toy_multi.y, TdeParameters(8, 10, True, 2, "IGB"), 2)
        assert not member.bigrams and 1 <= len(member.dimensions) <= 3

    def test_window_longer_than_series(self):
        ds = TimeSeriesDataset(np.zeros((4, 1, 10)), [0, 1, 0, 1], ("a", "b"))
        with pytest.raises(ValueError):
            build_individual_tde(ds.X, ds.y, TdeParameters(8, 12, True, 1, "MCB"), 2)
