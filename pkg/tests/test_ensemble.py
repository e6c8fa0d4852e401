import math

import numpy as np
import pytest

from hc2.arsenal.ensemble import Arsenal, ArsenalConfig
from hc2.core import RandomStream
from hc2.drcif.forest import DrCIF, DrcifConfig
from hc2.ensemble import (
    BuildInterrupted,
    Deadline,
    bootstrap_indices,
    canonical_bytes,
    member_loop,
    oob_estimate,
    vote_distribution,
)
from hc2.stc.classifier import STC, StcConfig
from hc2.tde.ensemble import TDE, TdeConfig


def test_vote_distribution_sums_and_weights():
    p = vote_distribution(np.array([[0, 1, 1], [0, 0, 1]]), np.array([1.0, 3.0]), 3)
    np.testing.assert_allclose(p, [[1, 0, 0], [0.75, 0.25, 0], [0, 1, 0]])


def test_oob_excludes_uncovered_cases():
    P = np.array([[0, -1, 1, -1], [-1, -1, 1, -1]])
    est = oob_estimate(P, np.array([0, 1, 0, 1]), 2)
    np.testing.assert_array_equal(est.covered, [True, False, True, False])
    assert est.accuracy == 0.5 and not est.resubstitution
    assert np.isnan(est.proba[1]).all()


def test_oob_falls_back_to_resubstitution():
    est = oob_estimate(np.full((2, 3), -1), np.array([0, 1, 1]), 2, fallback_predictions=lambda: [0, 1, 0])
    assert est.resubstitution and est.accuracy == pytest.approx(2 / 3)


def test_single_class_train_estimate_is_one():
    est = oob_estimate(np.array([[0, -1, 0]]), np.zeros(3, dtype=int), 2)
    assert est.accuracy == 1.0


def test_one_member_bootstrap_coverage():
    # a bootstrap of n leaves out about (1 - 1/n)^n of the cases
    n, reps = 200, 200
    rng = np.random.default_rng(0)
    frac = np.mean([1 - len(np.unique(bootstrap_indices(n, rng))) / n for _ in range(reps)])
    assert abs(frac - (1 - 1 / n) ** n) < 0.01
    assert abs(frac - math.exp(-1)) < 0.01


def _replay(clf, stream, train, member):
    """Recompute each bagged member's out-of-bag votes from its own stream."""
    n = train.n_cases
    preds = np.full((len(clf.oob_predictions_), n), -1)
    for j in range(len(clf.oob_predictions_)):
        preds[j] = member(stream.child(1).child(j))
    return oob_estimate(preds, train.y, train.n_classes)


def test_drcif_mask_replay(toy):
    clf = DrCIF(DrcifConfig(n_trees=4)).fit(toy, RandomStream(9))
    from hc2.drcif.forest import representations
    reps = representations(toy.X)
    est = _replay(clf, RandomStream(9), toy, lambda s: clf._member(toy, reps, s, True)[1])
    assert est.accuracy == clf.train_accuracy
    # the stored masks agree with fresh bootstrap draws
    for j, row in enumerate(clf.oob_predictions_):
        idx = bootstrap_indices(toy.n_cases, RandomStream(9).child(1).child(j).generator())
        out = np.ones(toy.n_cases, bool)
        out[idx] = False
        np.testing.assert_array_equal(row >= 0, out)


def test_arsenal_mask_replay(toy):
    clf = Arsenal(ArsenalConfig(3, 40)).fit(toy, RandomStream(2))
    est = _replay(clf, RandomStream(2), toy, lambda s: clf._member(toy, s, True))
    assert est.accuracy == clf.train_accuracy


def test_tde_estimate_uses_left_out_cases(toy):
    clf = TDE(TdeConfig(5, 3, n_random=4)).fit(toy, RandomStream(0))
    preds = np.full((len(clf.members_), toy.n_cases), -1)
    for r, m in enumerate(clf.members_):
        out = np.setdiff1d(np.arange(toy.n_cases), m.subsample)
        preds[r, out] = m.predict(toy.X[out])
    assert oob_estimate(preds, toy.y, 2, clf.weights_).accuracy == clf.train_accuracy


def test_stc_estimate_bags_only_the_forest(toy):
    clf = STC(StcConfig(n_candidates=40, n_trees=4)).fit(toy, RandomStream(1))
    assert clf.oob_predictions_.shape == (4, toy.n_cases)
    assert 0 <= clf.train_accuracy <= 1


def test_member_loop_builds_at_least_one_member():
    members = []
    done = member_loop(lambda j: j, members, 10, deadline=Deadline.after(-1.0))
    assert members == [0] and not done
    assert member_loop(lambda j: j, members, 3)
    assert members == [0, 1, 2]


def test_interrupt_and_resume_identical(toy):
    straight = Arsenal(ArsenalConfig(4, 30)).fit(toy, RandomStream(5))
    state, calls = {}, [0]

    def stop(st):
        calls[0] += 1
        if calls[0] == 3:
            raise BuildInterrupted()

    with pytest.raises(BuildInterrupted):
        Arsenal(ArsenalConfig(4, 30)).fit(toy, RandomStream(5), state=state, on_progress=stop)
    resumed = Arsenal(ArsenalConfig(4, 30)).fit(toy, RandomStream(5), state=state)
    assert resumed.to_bytes() == straight.to_bytes()


def test_threads_do_not_change_models(toy):
    for make in (lambda: DrCIF(DrcifConfig(n_trees=4)), lambda: Arsenal(ArsenalConfig(3, 30)),
                 lambda: TDE(TdeConfig(4, 3, n_random=4)), lambda: STC(StcConfig(n_candidates=30, n_trees=3))):
        a = make().fit(toy, RandomStream(3), threads=1)
        b = make().fit(toy, RandomStream(3), threads=4)
        assert a.to_bytes() == b.to_bytes()


def test_canonical_bytes_distinguish_types():
    assert canonical_bytes(1) != canonical_bytes(1.0)
    assert canonical_bytes({"a": np.arange(3)}) == canonical_bytes({"a": np.arange(3)})
    assert canonical_bytes(np.arange(3)) != canonical_bytes(np.arange(3.0))
