"""Behavioral tests for the scripting binding and its model handles."""

from concurrent.futures import ThreadPoolExecutor
import inspect

import numpy as np
import pytest

import binboost_bridge as bridge
from binboost.analysis import (
    elimination_importance,
    gain_importance,
    individual_importance,
    roc_auc,
)
from binboost.boosting import FitConfig, fit_forest, predict_batch
from binboost.model_io import serialize_forest


def xor_table():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    return X, y


def gaussian_data(n=120, d=3, seed=42):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = (rng.random(n) < 0.5).astype(int)
    X[:, 0] += 1.5 * y
    return X, y


@pytest.fixture(scope="module")
def small_model():
    X, y = gaussian_data()
    return bridge.fit(X, y, trees=12, depth=2, binning_levels=3, seed=1), X


class TestFit:
    def test_xor_reaches_high_training_auc(self):
        X, y = xor_table()
        model = bridge.fit(
            X, y, trees=10, depth=2, subsample=1.0, binning_levels=1, seed=0
        )
        auc = roc_auc(model.predict(X), np.where(y > 0, 1, -1))
        assert auc >= 0.99

    def test_label_length_mismatch_reports_both_sizes(self):
        X = np.zeros((3, 2))
        with pytest.raises(ValueError, match=r"labels length 4.*3 feature rows"):
            bridge.fit(X, np.array([0, 1, 0, 1]))

    def test_rejects_labels_outside_zero_one(self):
        X, y = gaussian_data(n=20)
        y = y.astype(float)
        y[3] = 2.0
        with pytest.raises(ValueError, match=r"labels must be 0 or 1.*2\.0"):
            bridge.fit(X, y)

    def test_rejects_signed_label_convention(self):
        X, _ = gaussian_data(n=10)
        with pytest.raises(ValueError, match="labels must be 0 or 1"):
            bridge.fit(X, np.array([-1, 1] * 5))

    def test_rejects_one_dimensional_features(self):
        with pytest.raises(ValueError, match=r"2-d.*\(3,\)"):
            bridge.fit(np.array([1.0, 2.0, 3.0]), np.array([0, 1, 0]))

    def test_rejects_ragged_rows(self):
        with pytest.raises(ValueError):
            bridge.fit([[1.0, 2.0], [3.0]], [0, 1])

    def test_weights_shape_mismatch_reports_shapes(self):
        X, y = gaussian_data(n=10)
        with pytest.raises(ValueError, match=r"weights shape \(3,\).*\(10,\)"):
            bridge.fit(X, y, weights=np.ones(3))

    def test_single_class_rejected(self):
        X, _ = gaussian_data(n=10)
        with pytest.raises(ValueError, match="both classes"):
            bridge.fit(X, np.ones(10, dtype=int))

    def test_defaults_mirror_engine_defaults(self):
        cfg = FitConfig()
        defaults = {
            name: p.default for name, p in inspect.signature(bridge.fit).parameters.items()
        }
        assert defaults["trees"] == cfg.n_trees
        assert defaults["depth"] == cfg.depth
        assert defaults["shrinkage"] == cfg.shrinkage
        assert defaults["subsample"] == cfg.subsample
        assert defaults["binning_levels"] == cfg.binning_levels
        assert defaults["seed"] == cfg.seed
        assert defaults["weights"] is None

    def test_hyperparameters_echoed_on_handle(self):
        X, y = gaussian_data(n=40)
        model = bridge.fit(X, y, trees=7, depth=2, binning_levels=2, seed=9)
        assert model.config.n_trees == 7
        assert model.config.depth == 2
        assert model.config.binning_levels == 2
        assert model.config.seed == 9
        assert model.n_features == X.shape[1]

    def test_invalid_hyperparameters_rejected(self):
        X, y = gaussian_data(n=20)
        with pytest.raises(ValueError, match="shrinkage"):
            bridge.fit(X, y, shrinkage=0.0)

    def test_weights_pass_through_to_engine(self):
        X, y = gaussian_data(n=60, seed=3)
        w = np.random.default_rng(4).gamma(2.0, size=60)
        cfg = FitConfig(n_trees=8, depth=2, binning_levels=3, seed=5)
        via_bridge = bridge.fit(
            X, y, weights=w, trees=8, depth=2, binning_levels=3, seed=5
        )
        direct = fit_forest(X, y, w, cfg)
        assert serialize_forest(via_bridge._forest) == serialize_forest(direct)


class TestPredict:
    def test_matches_engine_batch_prediction(self, small_model):
        model, X = small_model
        np.testing.assert_array_equal(model.predict(X), predict_batch(model._forest, X))

    def test_empty_matrix_gives_empty_result(self, small_model):
        model, X = small_model
        assert model.predict(np.empty((0, X.shape[1]))).shape == (0,)
        assert model.predict([]).shape == (0,)

    def test_arity_mismatch_raises(self, small_model):
        model, X = small_model
        with pytest.raises(ValueError):
            model.predict(np.zeros((2, X.shape[1] + 1)))

    def test_missing_cells_allowed(self, small_model):
        model, X = small_model
        rows = np.full((2, X.shape[1]), np.nan)
        rows[1, 0] = 0.5
        probs = model.predict(rows)
        np.testing.assert_array_equal(probs, predict_batch(model._forest, rows))
        assert np.isfinite(probs).all()

    def test_one_dimensional_nonempty_rejected(self, small_model):
        model, X = small_model
        with pytest.raises(ValueError, match="2-d"):
            model.predict(np.zeros(X.shape[1]))


class TestSaveLoad:
    def test_roundtrip_predictions_identical(self, small_model, tmp_path):
        model, X = small_model
        path = str(tmp_path / "model.json")
        model.save(path)
        reloaded = bridge.load(path)
        np.testing.assert_array_equal(reloaded.predict(X), model.predict(X))

    def test_save_is_stable_across_roundtrip(self, small_model, tmp_path):
        model, _ = small_model
        first = str(tmp_path / "a.json")
        second = str(tmp_path / "b.json")
        model.save(first)
        bridge.load(first).save(second)
        with open(first) as fa, open(second) as fb:
            assert fa.read() == fb.read()

    def test_corrupt_file_raises_cleanly(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not valid json")
        with pytest.raises(ValueError, match="invalid JSON"):
            bridge.load(str(path))

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            bridge.load(str(tmp_path / "absent.json"))


class TestClosedHandle:
    def test_operations_raise_after_close(self, tmp_path):
        X, y = gaussian_data(n=30)
        model = bridge.fit(X, y, trees=3, depth=1, binning_levels=2)
        model.close()
        with pytest.raises(RuntimeError, match="closed"):
            model.predict(X)
        with pytest.raises(RuntimeError, match="closed"):
            model.save(str(tmp_path / "m.json"))
        with pytest.raises(RuntimeError, match="closed"):
            model.importance("gain")
        with pytest.raises(RuntimeError, match="closed"):
            model.config

    def test_close_is_idempotent(self):
        X, y = gaussian_data(n=30)
        model = bridge.fit(X, y, trees=3, depth=1, binning_levels=2)
        model.close()
        model.close()

    def test_context_manager_closes(self):
        X, y = gaussian_data(n=30)
        with bridge.fit(X, y, trees=3, depth=1, binning_levels=2) as model:
            assert model.predict(X).shape == (30,)
        with pytest.raises(RuntimeError, match="closed"):
            model.predict(X)


class TestImportance:
    def test_gain_matches_engine(self, small_model):
        model, _ = small_model
        np.testing.assert_array_equal(
            model.importance("gain"), gain_importance(model._forest).scores
        )

    def test_gain_rejects_extra_arguments(self, small_model):
        model, X = small_model
        with pytest.raises(ValueError, match="no extra arguments"):
            model.importance("gain", row=X[0])

    def test_individual_matches_engine(self, small_model):
        model, X = small_model
        np.testing.assert_array_equal(
            model.importance("individual", row=X[0]),
            individual_importance(model._forest, X[0]).scores,
        )

    def test_individual_requires_row(self, small_model):
        model, _ = small_model
        with pytest.raises(ValueError, match="requires row="):
            model.importance("individual")

    def test_elimination_matches_engine(self):
        X, y = gaussian_data(n=80, d=2, seed=8)
        model = bridge.fit(X, y, trees=5, depth=2, binning_levels=2, seed=2)
        scores = model.importance("elimination", X=X, y=y)
        direct = elimination_importance(
            X, y.astype(float), None, model.config
        )
        np.testing.assert_array_equal(scores, direct.scores)

    def test_elimination_requires_training_data(self, small_model):
        model, X = small_model
        with pytest.raises(ValueError, match="requires X= and y="):
            model.importance("elimination", X=X)

    def test_unknown_method_rejected(self, small_model):
        model, _ = small_model
        with pytest.raises(ValueError, match="unknown importance method"):
            model.importance("permutation")


class TestConcurrency:
    def test_concurrent_predictions_match_serial(self, small_model):
        model, X = small_model
        serial = model.predict(X)
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(lambda _: model.predict(X), range(8)))
        for got in results:
            np.testing.assert_array_equal(got, serial)
