import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hc2.tree import entropy, fit_tree
from oracle_trials import TOLERANCE, run_trials


def test_single_class_is_one_leaf():
    t = fit_tree(np.random.default_rng(0).standard_normal((6, 3)), np.zeros(6, dtype=int), 2)
    assert t.n_nodes == 1
    np.testing.assert_array_equal(t.leaf_distributions[0], [1, 0])


def test_separating_column_gives_depth_one():
    X = np.column_stack([np.random.default_rng(1).standard_normal(10), np.r_[np.zeros(5), np.ones(5)]])
    y = np.r_[np.zeros(5, int), np.ones(5, int)]
    t = fit_tree(X, y, 2)
    assert t.depth() == 1
    assert t.feature[0] == 1 and t.threshold[0] == 0.5
    assert np.all(t.predict(X) == y)


def test_margin_then_column_tie_break():
    # both columns separate perfectly; column 1 has the wider gap
    X = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 5.0], [3.0, 5.0]])
    y = np.array([0, 0, 1, 1])
    assert fit_tree(X, y, 2).feature[0] == 1
    # equal gaps: lower column wins
    X2 = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    assert fit_tree(X2, y, 2).feature[0] == 0


def test_equal_goes_left():
    X = np.array([[0.0], [1.0]])
    t = fit_tree(X, np.array([0, 1]), 2)
    assert t.predict(np.array([[0.5]]))[0] == 0  # exactly the threshold
    assert t.predict(np.array([[0.5000001]]))[0] == 1


def test_root_split_oracle():
    assert run_trials("tree_root_split", 100, seed=11) <= TOLERANCE


@given(st.integers(0, 2**31))
def test_stored_gains_recompute(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 25))
    X = rng.standard_normal((n, 3))
    y = rng.integers(0, 3, n)
    t = fit_tree(X, y, 3)
    assert np.isclose(t.leaf_distributions.sum(axis=1), 1).all()
    for node in range(t.n_nodes):
        if t.feature[node] < 0:
            continue
        l, r = t.left[node], t.right[node]
        nl, nr = t.counts[l].sum(), t.counts[r].sum()
        full = t.counts[node].sum()
        gain = entropy(t.counts[node]) - nl / full * entropy(t.counts[l]) - nr / full * entropy(t.counts[r])
        assert t.gain[node] >= 0
        assert abs(t.gain[node] - gain) < 1e-9
        np.testing.assert_array_equal(t.counts[l] + t.counts[r], t.counts[node])


@given(st.integers(0, 2**31))
def test_distinct_rows_fit_perfectly(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((15, 2))
    y = rng.integers(0, 2, 15)
    assert np.all(fit_tree(X, y, 2).predict(X) == y)


def test_rejects_bad_shapes():
    with pytest.raises(ValueError):
        fit_tree(np.zeros((3,)), np.zeros(3, dtype=int), 2)


def test_entropy_matches_oracle():
    y = np.array([0, 0, 1, 2, 2, 2])
    assert abs(entropy(np.bincount(y)) - oracles.entropy(y, 3)) < 1e-15
