"""Bonn EEG dataset tests; skipped cleanly when the dataset is absent.

Point ``TSWORKBENCH_EEG_DIR`` at a directory with Z/O/N/F/S subdirectories
to enable them.
"""

import numpy as np
import pytest

from tsworkbench import (
    ChannelData,
    FeaturizeRequest,
    LearnerSpec,
    TimeSeries,
    featureset_select,
    featurize_time_series,
    haar_wavedec,
    model_from_featureset,
    model_predictions,
    train_test_split,
)
from tsworkbench.datasets import eeg_data_dir, load_eeg_seizure

pytestmark = pytest.mark.skipif(
    eeg_data_dir() is None, reason="EEG dataset not present locally"
)

BUILTIN_FEATURES = (
    "amplitude",
    "maximum",
    "max_slope",
    "median",
    "median_absolute_deviation",
    "percent_beyond_1_std",
    "percent_close_to_median",
    "minimum",
    "skew",
    "std",
    "weighted_average",
)
GUO_FEATURES = ("mean", "std", "mean2", "abs_diffs", "skew")


@pytest.fixture(scope="module")
def eeg_series():
    series = load_eeg_seizure()
    assert len(series) == 500
    return series


@pytest.fixture(scope="module")
def fset_builtin(eeg_series):
    req = FeaturizeRequest(features=BUILTIN_FEATURES, parallelism="auto")
    return featurize_time_series(eeg_series, req)


@pytest.fixture(scope="module")
def fset_guo(eeg_series):
    req = FeaturizeRequest(features=GUO_FEATURES, parallelism="auto")
    return featurize_time_series(eeg_series, req)


@pytest.fixture(scope="module")
def fset_dwt(eeg_series):
    banded = []
    for ts in eeg_series:
        bands = haar_wavedec(ts.channels[0].values, level=4)
        banded.append(
            TimeSeries(
                name=ts.name,
                channels=tuple(ChannelData(values=b) for b in bands),
                target=ts.target,
            )
        )
    req = FeaturizeRequest(features=GUO_FEATURES, parallelism="auto")
    return featurize_time_series(banded, req)


class TestReportedFeatureValues:
    def test_first_two_series_min_amplitude(self, fset_builtin):
        col = {n: i for i, n in enumerate(fset_builtin.feature_names)}
        assert fset_builtin.values[0, 0, col["minimum"]] == -146.0
        assert fset_builtin.values[1, 0, col["minimum"]] == -254.0
        assert fset_builtin.values[0, 0, col["amplitude"]] == 143.5
        assert fset_builtin.values[1, 0, col["amplitude"]] == 211.5

    def test_guo_means_and_abs_diffs(self, fset_guo):
        col = {n: i for i, n in enumerate(fset_guo.feature_names)}
        assert fset_guo.values[0, 0, col["mean"]] == pytest.approx(-4.132, rel=5e-3)
        assert fset_guo.values[1, 0, col["mean"]] == pytest.approx(-52.44, rel=5e-3)
        assert fset_guo.values[0, 0, col["abs_diffs"]] == pytest.approx(4695.2, rel=5e-3)
        assert fset_guo.values[1, 0, col["abs_diffs"]] == pytest.approx(6112.6, rel=5e-3)

    def test_dimensions_match_reported(self, fset_builtin, fset_dwt):
        assert fset_builtin.values.shape[:2] == (500, 1)
        assert fset_dwt.values.shape[:2] == (500, 5)


def accuracy(fs, train_idx, test_idx, spec):
    model = model_from_featureset(featureset_select(fs, train_idx), spec)
    predicted = model_predictions(featureset_select(fs, test_idx), model)
    truth = [fs.targets[i] for i in test_idx]
    return float(np.mean([p == t for p, t in zip(predicted, truth)]))


class TestClassificationReproduction:
    def test_three_model_accuracies(self, fset_builtin, fset_guo, fset_dwt):
        targets = list(fset_builtin.targets)
        train, test = train_test_split(500, 0.5, seed=0, targets=targets)

        rf = LearnerSpec(
            kind="random_forest",
            param_grid={"n_estimators": [8, 32, 128, 512]},
            seed=0,
        )
        knn = LearnerSpec(kind="knn", param_grid={"n_neighbors": [1, 2, 3, 4]}, seed=0)

        acc_builtin = accuracy(fset_builtin, train, test, rf)
        acc_guo = accuracy(fset_guo, train, test, knn)
        acc_dwt = accuracy(fset_dwt, train, test, knn)

        assert abs(acc_builtin - 0.8320) <= 0.05, acc_builtin
        assert abs(acc_guo - 0.8480) <= 0.05, acc_guo
        assert abs(acc_dwt - 0.9520) <= 0.05, acc_dwt
