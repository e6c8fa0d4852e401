import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hc2.arsenal.ensemble import Arsenal, ArsenalConfig, Rocket, rocket_preset
from hc2.arsenal.rocket import (
    KERNEL_LENGTHS,
    RIDGE_ALPHAS,
    Kernel,
    apply_kernel,
    fit_ridge_cv,
    ridge_solve,
    sample_kernel,
    sample_kernels,
    transform,
)
from hc2.core import RandomStream
from oracle_trials import TOLERANCE, run_trials


def _zero_kernel(bias, l=7, m=20):
    return Kernel(l, np.zeros((1, l)), bias, 1, 0, np.zeros(1, dtype=np.int64))


class TestKernels:
    def test_zero_weights(self):
        x = np.random.default_rng(0).standard_normal(20)
        assert apply_kernel(_zero_kernel(1.0), x) == (1.0, 1.0)
        assert apply_kernel(_zero_kernel(-1.0), x) == (-1.0, 0.0)

    def test_univariate_channels(self):
        rng = np.random.default_rng(1)
        assert all(sample_kernel(50, 1, rng).channels.tolist() == [0] for _ in range(50))

    def test_boundary_dilation(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            k = sample_kernel(9, 1, rng)
            if k.length == 9:
                assert k.dilation == 1
            assert k.n_positions(9) > 0

    def test_length_frequencies(self):
        rng = np.random.default_rng(3)
        n = 10_000
        lengths = np.array([sample_kernel(100, 1, rng).length for _ in range(n)])
        sigma = math.sqrt(n * (1 / 3) * (2 / 3))
        for l in KERNEL_LENGTHS:
            assert abs(np.sum(lengths == l) - n / 3) <= 3 * sigma

    @given(st.integers(0, 2**31), st.integers(9, 80), st.integers(1, 6))
    def test_kernel_invariants(self, seed, m, d):
        k = sample_kernel(m, d, np.random.default_rng(seed))
        np.testing.assert_allclose(k.weights.sum(axis=1), 0, atol=1e-9)
        assert k.padding in (0, (k.length - 1) * k.dilation // 2)
        assert k.dilation >= 1 and k.n_positions(m) == m + 2 * k.padding - (k.length - 1) * k.dilation
        assert len(np.unique(k.channels)) == len(k.channels) and k.channels.max() < d
        _, ppv = apply_kernel(k, np.random.default_rng(seed).standard_normal((d, m)))
        assert 0 <= ppv <= 1

    @given(st.integers(0, 2**31))
    def test_constant_series_ppv_follows_bias(self, seed):
        k = sample_kernel(30, 1, np.random.default_rng(seed))
        k.padding = 0
        mx, ppv = apply_kernel(k, np.full(30, 2.5))
        assert mx == pytest.approx(k.bias, abs=1e-9)
        assert ppv == (1.0 if k.bias > 0 else 0.0)

    def test_length30_example(self):
        rng = np.random.default_rng(8)
        k = sample_kernel(30, 1, rng)
        x = rng.standard_normal(30)
        got = apply_kernel(k, x)
        want = oracles.naive_kernel(k.weights, k.channels, k.bias, k.dilation, k.padding, x)
        assert got[0] == pytest.approx(want[0], abs=1e-9) and got[1] == want[1]

    def test_oracle_trials(self):
        assert run_trials("apply_kernel", 60, seed=2) <= TOLERANCE

    def test_transform_layout(self):
        rng = np.random.default_rng(4)
        ks = [sample_kernel(25, 2, rng) for _ in range(3)]
        from hc2.arsenal.rocket import KernelSet
        X = rng.standard_normal((4, 2, 25))
        F = transform(KernelSet.pack(ks), X)
        assert F.shape == (4, 6)
        for j, k in enumerate(ks):
            assert tuple(F[2, 2 * j:2 * j + 2]) == apply_kernel(k, X[2])


class TestRidge:
    def test_normal_equations_6x4(self):
        rng = np.random.default_rng(0)
        X, y = rng.standard_normal((6, 4)), rng.standard_normal(6)
        np.testing.assert_allclose(ridge_solve(X, y, 0.7), oracles.normal_equations_ridge(X, y, 0.7), atol=1e-8)

    def test_oracle_trials(self):
        assert run_trials("ridge_solve", 60, seed=4) <= TOLERANCE

    def test_separable_toy(self):
        rng = np.random.default_rng(1)
        F = np.vstack([rng.normal(-2, 0.3, (10, 2)), rng.normal(2, 0.3, (10, 2))])
        y = np.r_[np.zeros(10, int), np.ones(10, int)]
        assert np.all(fit_ridge_cv(F, y).predict(F) == y)

    def test_duplicated_columns_finite(self):
        rng = np.random.default_rng(2)
        f = rng.standard_normal((12, 1))
        model = fit_ridge_cv(np.hstack([f, f, f]), (f[:, 0] > 0).astype(int))
        assert np.isfinite(model.coef).all()

    def test_single_class_constant(self):
        model = fit_ridge_cv(np.random.default_rng(0).standard_normal((5, 3)), np.full(5, 2))
        assert model.predict(np.zeros((3, 3))).tolist() == [2, 2, 2]

    def test_closed_form_loo_matches_refits(self):
        rng = np.random.default_rng(5)
        n = 14
        F = rng.standard_normal((n, 5))
        y = rng.integers(0, 3, n)
        model = fit_ridge_cv(F, y)
        classes = np.unique(y)
        Z = (F - F.mean(0)) / F.std(0)
        Y = np.where(y[:, None] == classes, 1.0, -1.0)

        def loo_error(a):
            err = 0.0
            for i in range(n):
                keep = np.arange(n) != i
                zm, ym = Z[keep].mean(0), Y[keep].mean(0)
                b = oracles.normal_equations_ridge(Z[keep] - zm, Y[keep] - ym, a)
                err += np.sum((Y[i] - (ym + (Z[i] - zm) @ b)) ** 2)
            return err

        errs = [loo_error(a) for a in RIDGE_ALPHAS]
        assert model.alpha == RIDGE_ALPHAS[int(np.argmin(errs))]


class TestEnsemble:
    def test_single_member_one_hot_and_rocket_preset(self, toy):
        clf = Arsenal(ArsenalConfig(1, 50)).fit(toy, RandomStream(0))
        assert set(np.unique(clf.predict_proba(toy))) <= {0.0, 1.0}
        r = rocket_preset()
        assert isinstance(r, Rocket) and r.config == ArsenalConfig(1, 10_000)

    def test_vote_fraction(self, toy):
        clf = Arsenal(ArsenalConfig(5, 30)).fit(toy, RandomStream(1))
        votes = np.array([m.predict(toy.X) for m in clf.members_])
        p = clf.predict_proba(toy)
        np.testing.assert_allclose(p[:, 1], votes.mean(axis=0))
        clf.members_ = clf.members_[::-1]
        np.testing.assert_array_equal(clf.predict_proba(toy), p)

    def test_determinism(self, toy_multi):
        a = Arsenal(ArsenalConfig(3, 40)).fit(toy_multi, RandomStream(4))
        b = Arsenal(ArsenalConfig(3, 40)).fit(toy_multi, RandomStream(4))
        assert a.to_bytes() == b.to_bytes()
        assert 0 <= a.train_accuracy <= 1

    def test_kernel_packing_shape(self):
        ks = sample_kernels(20, 1, 7, np.random.default_rng(0))
        assert len(ks) == 7 and ks.weight_offsets[-1] == ks.weights.size
