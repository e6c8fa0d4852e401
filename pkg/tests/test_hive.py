import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_dataset, tiny_overrides
from hc2.ensemble import BuildInterrupted
from hc2.hive import (
    COMPONENTS,
    VARIANTS,
    Checkpoint,
    CheckpointError,
    Hc2Config,
    build_hc2,
    combine,
    component_stream,
    make_component,
    predict_hc2,
    tilted_weights,
)
from hc2.hive.checkpoint import FILENAME
from hc2.hive.components import all_subsets, normalise_components

TINY = tiny_overrides()


def tiny_config(**kw):
    kw.setdefault("overrides", TINY)
    return Hc2Config(**kw)


class TestCombine:
    def test_tilt_example(self):
        w = tilted_weights([0.9, 0.6], 4)
        assert abs(w[0] - 0.6561) < 1e-12 and abs(w[1] - 0.1296) < 1e-12
        p = combine([[1.0, 0.0], [0.0, 1.0]], [0.9, 0.6])
        np.testing.assert_allclose(p, [0.6561 / 0.7857, 0.1296 / 0.7857], atol=1e-12)
        np.testing.assert_allclose(p, [0.835, 0.165], atol=1e-3)

    def test_identical_inputs_pass_through(self):
        d = np.array([0.2, 0.5, 0.3])
        np.testing.assert_allclose(combine([d, d, d], [0.7, 0.2, 0.9]), d, atol=1e-15)

    def test_zero_estimate_contributes_nothing(self):
        np.testing.assert_array_equal(combine([[1.0, 0.0], [0.0, 1.0]], [0.8, 0.0]), [1.0, 0.0])

    def test_all_zero_is_uniform(self):
        np.testing.assert_array_equal(combine([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [0.0, 0.0]), np.full(3, 1 / 3))

    def test_single_component_identity(self):
        d = np.array([[0.1, 0.9], [0.4, 0.6]])
        np.testing.assert_array_equal(combine([d], [0.3]), d)
        np.testing.assert_array_equal(combine([d], [0.0]), d)

    def test_hand_built_three_components(self):
        dists = [np.array([0.7, 0.2, 0.1]), np.array([0.1, 0.8, 0.1]), np.array([0.3, 0.3, 0.4])]
        est = [0.8, 0.5, 0.9]
        w = [0.4096, 0.0625, 0.6561]
        manual = [sum(wi * d[c] for wi, d in zip(w, dists)) / sum(w) for c in range(3)]
        np.testing.assert_allclose(combine(dists, est), manual, atol=1e-15)

    @given(st.integers(0, 2**31), st.integers(2, 5), st.integers(2, 4))
    def test_properties(self, seed, k, c):
        rng = np.random.default_rng(seed)
        dists = [rng.dirichlet(np.ones(c), size=3) for _ in range(k)]
        est = rng.uniform(0.05, 1, k)
        out = combine(dists, est)
        np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)
        # scaling every weight by a constant: alpha fixed, so scale the estimates by s^(1/alpha)
        s = rng.uniform(0.2, 0.99)
        np.testing.assert_allclose(combine(dists, est * s), out, atol=1e-12)
        perm = rng.permutation(k)
        swapped = combine([dists[i] for i in perm], est[perm])
        np.testing.assert_allclose(swapped, out, atol=1e-12)
        np.testing.assert_array_equal(np.argmax(swapped, axis=1), np.argmax(out, axis=1))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            combine([[1.0, 0.0], [1.0, 0.0, 0.0]], [0.5, 0.5])
        with pytest.raises(ValueError):
            combine([[1.0, 0.0]], [1.5])
        with pytest.raises(ValueError):
            tilted_weights([0.5], alpha=0)


class TestVariants:
    def test_eleven_subsets_match_table(self):
        subsets = set(all_subsets(2))
        assert len(subsets) == 11
        assert set(VARIANTS.values()) == subsets
        assert VARIANTS["HC-1"] == ("DrCIF", "Arsenal") and VARIANTS["HC-10"] == ("TDE", "Arsenal", "STC")
        assert VARIANTS["HC2"] == COMPONENTS
        assert [k for k in VARIANTS] == [f"HC-{i}" for i in range(1, 11)] + ["HC2"]

    def test_normalise(self):
        assert normalise_components("stc, tde") == ("TDE", "STC")
        with pytest.raises(ValueError):
            normalise_components("rocket")
        with pytest.raises(ValueError):
            normalise_components([])

    def test_config_validation(self):
        with pytest.raises(ValueError):
            Hc2Config(alpha=0)
        with pytest.raises(ValueError):
            Hc2Config(contract=0)
        assert Hc2Config(components="drcif").components == ("DrCIF",)


class TestCheckpoint:
    def _ckpt(self):
        c = Checkpoint("abc")
        c.put("TDE", "done", {"x": np.arange(4)})
        c.put("DrCIF", "partial", {"trees": [1, 2]})
        c.put("STC", "failed", None, "ValueError: too short")
        return c

    def test_fixpoint(self, tmp_path):
        p = tmp_path / FILENAME
        self._ckpt().save(p)
        first = p.read_bytes()
        Checkpoint.load(p, "abc").save(p)
        assert p.read_bytes() == first
        loaded = Checkpoint.load(p, "abc")
        np.testing.assert_array_equal(loaded.entries["TDE"].value()["x"], np.arange(4))
        assert loaded.entries["STC"].message == "ValueError: too short"

    def test_truncated_rejected_and_original_untouched(self, tmp_path):
        p = tmp_path / FILENAME
        self._ckpt().save(p)
        data = p.read_bytes()
        for cut in (3, 12, len(data) // 2, len(data) - 1):
            bad = tmp_path / f"cut{cut}"
            bad.write_bytes(data[:cut])
            with pytest.raises(CheckpointError):
                Checkpoint.load(bad, "abc")
        assert p.read_bytes() == data

    def test_corrupt_and_mismatch_rejected(self, tmp_path):
        p = tmp_path / FILENAME
        self._ckpt().save(p)
        data = bytearray(p.read_bytes())
        data[-2] ^= 0xFF
        (tmp_path / "flip").write_bytes(bytes(data))
        with pytest.raises(CheckpointError):
            Checkpoint.load(tmp_path / "flip", "abc")
        with pytest.raises(CheckpointError, match="configuration"):
            Checkpoint.load(p, "other")
        wrong_version = bytearray(p.read_bytes())
        wrong_version[8] = 99
        (tmp_path / "ver").write_bytes(bytes(wrong_version))
        with pytest.raises(CheckpointError, match="version"):
            Checkpoint.load(tmp_path / "ver", "abc")


@pytest.fixture(scope="module")
def straight(toy):
    return build_hc2(toy, tiny_config())


class TestController:
    def test_single_component_equals_component(self, toy):
        cfg = tiny_config(components=("DrCIF",), seed=3)
        model = build_hc2(toy, cfg)
        alone = make_component("DrCIF", config=cfg.component_config("DrCIF")).fit(toy, component_stream(3, "DrCIF"))
        np.testing.assert_array_equal(model.predict_proba(toy), alone.predict_proba(toy))
        assert model.components["DrCIF"].to_bytes() == alone.to_bytes()

    def test_components_match_standalone_streams(self, toy, straight):
        for cid in COMPONENTS:
            alone = make_component(cid, config=dict(TINY)[cid]).fit(toy, component_stream(0, cid))
            assert straight.components[cid].to_bytes() == alone.to_bytes()

    def test_prediction_is_combination(self, toy, straight):
        probs = straight.component_probabilities(toy)
        want = combine(list(probs.values()), straight.estimates, 4.0)
        np.testing.assert_array_equal(straight.predict_proba(toy), want)
        np.testing.assert_allclose(want.sum(axis=1), 1.0)
        np.testing.assert_array_equal(predict_hc2(straight, toy.X[0]), want[0])
        assert straight.predict(toy).tolist() == np.argmax(want, axis=1).tolist()

    def test_estimate_in_range(self, straight):
        assert 0.0 <= straight.train_accuracy <= 1.0
        assert all(r.ok for r in straight.reports)

    @pytest.mark.parametrize("stop_at", [1, 4, 9])
    def test_resume_equals_straight(self, toy, straight, tmp_path, stop_at):
        calls = [0]

        def interrupt(cid, state):
            calls[0] += 1
            if calls[0] == stop_at:
                raise BuildInterrupted(cid)

        cfg = tiny_config(checkpoint_dir=str(tmp_path))
        with pytest.raises(BuildInterrupted):
            build_hc2(toy, cfg, on_progress=interrupt)
        assert os.path.exists(tmp_path / FILENAME)
        resumed = build_hc2(toy, cfg)
        assert resumed.to_bytes() == straight.to_bytes()

    def test_mismatched_checkpoint_refused(self, toy, tmp_path):
        cfg = tiny_config(components=("Arsenal",), checkpoint_dir=str(tmp_path))
        build_hc2(toy, cfg)
        with pytest.raises(CheckpointError):
            build_hc2(toy, tiny_config(components=("Arsenal",), checkpoint_dir=str(tmp_path), seed=1))

    def test_failing_components_excluded(self):
        short = make_dataset(n=12, m=8, seed=2)  # too short for TDE and DrCIF
        model = build_hc2(short, tiny_config())
        failed = {r.component_id for r in model.reports if not r.ok}
        assert failed == {"TDE", "DrCIF"}
        assert set(model.components) == {"Arsenal", "STC"}
        np.testing.assert_allclose(model.predict_proba(short).sum(axis=1), 1.0)

    def test_all_failing_raises(self):
        short = make_dataset(n=12, m=8, seed=2)
        with pytest.raises(RuntimeError):
            build_hc2(short, tiny_config(components=("TDE", "DrCIF")))

    def test_digest_ignores_paths(self, tmp_path):
        assert tiny_config().digest() == tiny_config(checkpoint_dir=str(tmp_path)).digest()
        assert tiny_config().digest() != tiny_config(seed=1).digest()
