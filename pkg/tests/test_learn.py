"""Learners: splits, folds, grid search, prediction contracts."""

import numpy as np
import pytest

from tsworkbench import (
    FeatureSet,
    LearnerSpec,
    ValidationError,
    design_matrix,
    featureset_select,
    model_from_featureset,
    model_predictions,
    train_test_split,
)
from tsworkbench.learn import stratified_folds
from tsworkbench.learn.trees import forest_fit, forest_predict_proba

from conftest import blob_featureset, random_featureset


class TestTrainTestSplit:
    def test_partition_contract(self):
        train, test = train_test_split(10, 0.5, seed=0)
        assert sorted(train + test) == list(range(10))
        assert len(test) == 5
        assert not set(train) & set(test)

    def test_seeded_determinism(self):
        assert train_test_split(50, 0.3, seed=9) == train_test_split(50, 0.3, seed=9)
        assert train_test_split(50, 0.3, seed=9) != train_test_split(50, 0.3, seed=10)

    def test_stratified_balanced_classes(self):
        targets = [f"c{i % 5}" for i in range(500)]
        train, test = train_test_split(500, 0.25, seed=3, targets=targets)
        assert len(test) == 125
        for c in range(5):
            got = sum(1 for i in test if targets[i] == f"c{c}")
            assert got == 25

    def test_stratified_tiny_class_rejected(self):
        targets = ["a"] * 9 + ["b"]
        with pytest.raises(ValidationError, match="'b'"):
            train_test_split(10, 0.5, seed=0, targets=targets)

    def test_bad_fraction(self):
        with pytest.raises(ValidationError):
            train_test_split(10, 0.0, seed=0)
        with pytest.raises(ValidationError):
            train_test_split(10, 1.0, seed=0)


class TestStratifiedFolds:
    def test_proportions_within_one_sample(self, rng):
        y = np.array([0] * 37 + [1] * 23 + [2] * 40)
        rng.shuffle(y)
        folds = stratified_folds(y, 5, seed=11)
        assert sorted(int(i) for f in folds for i in f) == list(range(100))
        for label in (0, 1, 2):
            per_fold = [int(np.sum(y[f] == label)) for f in folds]
            assert max(per_fold) - min(per_fold) <= 1


class TestDesignMatrix:
    def test_column_order_feature_major(self, rng):
        fs = random_featureset(rng, n_series=3, n_channels=2, n_features=2)
        values = np.nan_to_num(fs.values, nan=0.5)
        fs = FeatureSet(
            series_names=fs.series_names,
            feature_names=fs.feature_names,
            values=values,
            targets=fs.targets,
            metadata=fs.metadata,
        )
        dm = design_matrix(fs)
        assert dm.column_names == ("f0_ch0", "f0_ch1", "f1_ch0", "f1_ch1")
        assert dm.data[1, 2] == fs.values[1, 0, 1]
        assert dm.data[1, 3] == fs.values[1, 1, 1]

    def test_single_channel_names_bare(self, rng):
        fs = blob_featureset(rng)
        dm = design_matrix(fs)
        assert dm.column_names == ("x0", "x1")

    def test_nan_rows_rejected_by_name(self, rng):
        values = np.ones((2, 1, 2))
        values[1, 0, 1] = np.nan
        fs = FeatureSet(
            series_names=("fine", "broken"), feature_names=("a", "b"), values=values
        )
        with pytest.raises(ValidationError, match="broken"):
            design_matrix(fs)

    def test_flatten_commutes_with_select(self, rng):
        fs = blob_featureset(rng, n_per_class=5)
        sel = [7, 2, 4]
        a = design_matrix(featureset_select(fs, sel)).data
        b = design_matrix(fs).data[sel]
        assert np.array_equal(a, b)


class TestKnn:
    def test_grid_search_achieves_separation(self, rng):
        fs = blob_featureset(rng, n_per_class=25)
        spec = LearnerSpec(kind="knn", param_grid={"n_neighbors": [1, 2, 3, 4]}, seed=5)
        model = model_from_featureset(fs, spec)
        assert model.params["n_neighbors"] in (1, 2, 3, 4)
        assert model.cv_accuracy == 1.0
        held_out = blob_featureset(np.random.default_rng(999), n_per_class=10)
        predicted = model_predictions(held_out, model)
        assert predicted == list(held_out.targets)

    def test_k1_perfect_on_training_rows(self, rng):
        fs = blob_featureset(rng, n_per_class=12)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        assert model_predictions(fs, model) == list(fs.targets)

    def test_probabilities_sum_to_one(self, rng):
        fs = blob_featureset(
            rng, n_per_class=10, centers=((0, 0), (8, 8), (0, 12)), spread=1.0
        )
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 3}, seed=0)
        )
        probs = model_predictions(fs, model, return_probs=True)
        assert probs.shape == (30, 3)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_vote_tie_broken_by_class_order(self):
        values = np.array([[0.0], [1.0]])[:, None, :]
        fs = FeatureSet(
            series_names=("n0", "n1"),
            feature_names=("x",),
            values=values,
            targets=("b_class", "a_class"),
        )
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 2}, cv_folds=2, seed=0)
        )
        query = FeatureSet(
            series_names=("q",),
            feature_names=("x",),
            values=np.array([[[0.5]]]),
        )
        # Both neighbors vote once; the earlier class name wins.
        assert model_predictions(query, model) == ["a_class"]


class TestForest:
    def test_seeded_reproducibility(self, rng):
        fs = blob_featureset(rng, n_per_class=15)
        spec = LearnerSpec(
            kind="random_forest", params={"n_estimators": 16}, seed=1234
        )
        a = model_from_featureset(fs, spec)
        b = model_from_featureset(fs, spec)
        assert a.state == b.state
        assert a.params == b.params
        q = blob_featureset(np.random.default_rng(5), n_per_class=6)
        assert np.array_equal(
            model_predictions(q, a, return_probs=True),
            model_predictions(q, b, return_probs=True),
        )

    def test_grid_repeated_calls_identical(self, rng):
        fs = blob_featureset(rng, n_per_class=10, spread=2.5)
        spec = LearnerSpec(
            kind="random_forest",
            param_grid={"n_estimators": [2, 4, 8]},
            cv_folds=3,
            seed=77,
        )
        a = model_from_featureset(fs, spec)
        b = model_from_featureset(fs, spec)
        assert a.params == b.params
        assert a.cv_accuracy == b.cv_accuracy

    def test_single_stump_predicts_majority(self):
        x = np.array([[0.0], [0.1], [0.2], [5.0]])
        y = np.array([0, 0, 0, 1])
        forest = forest_fit(x, y, n_classes=2, n_estimators=1, seed=0, max_depth=0)
        probs = forest_predict_proba(forest, x)
        assert np.all(np.argmax(probs, axis=1) == 0)

    def test_forest_separates_blobs(self, rng):
        fs = blob_featureset(rng, n_per_class=20)
        model = model_from_featureset(
            fs, LearnerSpec(kind="random_forest", params={"n_estimators": 16}, seed=3)
        )
        assert model_predictions(fs, model) == list(fs.targets)

    def test_probs_are_mean_leaf_distributions(self, rng):
        fs = blob_featureset(rng, n_per_class=8, spread=2.0)
        model = model_from_featureset(
            fs, LearnerSpec(kind="random_forest", params={"n_estimators": 8}, seed=3)
        )
        probs = model_predictions(fs, model, return_probs=True)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


class TestLayoutContract:
    def test_extra_columns_ignored(self, rng):
        fs = blob_featureset(rng, n_per_class=8)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        widened = FeatureSet(
            series_names=fs.series_names,
            feature_names=fs.feature_names + ("constant_extra",),
            values=np.concatenate(
                [fs.values, np.full((fs.n_series, 1, 1), 3.33)], axis=2
            ),
            targets=fs.targets,
        )
        assert model_predictions(widened, model) == model_predictions(fs, model)

    def test_missing_column_named(self, rng):
        fs = blob_featureset(rng, n_per_class=8)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, seed=0)
        )
        narrowed = FeatureSet(
            series_names=fs.series_names,
            feature_names=("x0",),
            values=fs.values[:, :, :1],
            targets=fs.targets,
        )
        with pytest.raises(ValidationError, match="x1"):
            model_predictions(narrowed, model)


class TestPredictDataFiles:
    @pytest.fixture
    def trained(self, tmp_path, rng):
        from tsworkbench import FeaturizeRequest, featurize_data_files
        from tsworkbench.learn import predict_data_files  # noqa: F401

        paths = []
        for i in range(6):
            label = "hot" if i % 2 else "cold"
            offset = 9.0 if i % 2 else 0.0
            lines = [f"# target={label}", "time,value"]
            for j in range(24):
                lines.append(f"{j},{offset + float(rng.normal()):.10g}")
            p = tmp_path / f"pd{i}.csv"
            p.write_text("\n".join(lines) + "\n")
            paths.append(str(p))
        req = FeaturizeRequest(features=("mean", "std", "amplitude"))
        fs = featurize_data_files(paths, req)
        model = model_from_featureset(
            fs, LearnerSpec(kind="knn", params={"n_neighbors": 1}, cv_folds=2, seed=0)
        )
        return paths, req, model

    def test_predictions_in_path_order(self, trained):
        from tsworkbench import predict_data_files

        paths, req, model = trained
        pred = predict_data_files(paths, model, req)
        assert pred.names == tuple(f"pd{i}" for i in range(6))
        assert pred.labels == ("cold", "hot") * 3
        assert pred.errors == (None,) * 6

    def test_equivalence_with_manual_two_step(self, trained):
        import numpy as np

        from tsworkbench import featurize_data_files, predict_data_files
        from tsworkbench.learn.model import predictions_for_featureset

        paths, req, model = trained
        composed = predict_data_files(paths, model, req, return_probs=True)
        manual = predictions_for_featureset(
            featurize_data_files(paths, req), model, return_probs=True
        )
        assert composed.names == manual.names
        assert composed.labels == manual.labels
        assert composed.probs.tobytes() == manual.probs.tobytes()

    def test_corrupt_file_flagged_unpredictable(self, trained, tmp_path):
        import warnings

        from tsworkbench import predict_data_files

        paths, req, model = trained
        broken = tmp_path / "broken.csv"
        broken.write_text("time,value\n0,what\n")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pred = predict_data_files(paths + [str(broken)], model, req)
        assert pred.labels[-1] is None
        assert pred.errors[-1].startswith("unpredictable:")
        assert all(e is None for e in pred.errors[:-1])


class TestModelFromFeaturesetValidation:
    def test_targets_required(self, rng):
        fs = blob_featureset(rng, n_per_class=5)
        untargeted = FeatureSet(
            series_names=fs.series_names,
            feature_names=fs.feature_names,
            values=fs.values,
        )
        with pytest.raises(ValidationError, match="targets"):
            model_from_featureset(untargeted, LearnerSpec(kind="knn"))

    def test_invalid_grid_key(self):
        with pytest.raises(ValidationError, match="invalid hyperparameters"):
            LearnerSpec(kind="knn", param_grid={"depth": [1]})

    def test_grid_tie_goes_to_first_point(self, rng):
        fs = blob_featureset(rng, n_per_class=20)
        spec = LearnerSpec(kind="knn", param_grid={"n_neighbors": [3, 1]}, seed=0)
        model = model_from_featureset(fs, spec)
        # Blobs are perfectly separable, every k ties at 1.0; first wins.
        assert model.params["n_neighbors"] == 3
