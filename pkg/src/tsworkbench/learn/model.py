"""Model building: cross-validated grid search, training, and prediction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from ..core import FeatureSet, ValidationError, featureset_select
from ..featurize import FeaturizeRequest, featurize_data_files
from .matrix import design_matrix
from .neighbors import KnnState, knn_fit, knn_predict_proba
from .trees import Forest, forest_fit, forest_predict_proba

_HYPERPARAMS = {
    "knn": {"n_neighbors"},
    "random_forest": {"n_estimators", "max_depth"},
}
_DEFAULTS = {
    "knn": {"n_neighbors": 5},
    "random_forest": {"n_estimators": 100, "max_depth": None},
}


@dataclass(frozen=True)
class LearnerSpec:
    """Learner kind plus fixed params and/or a grid to search over."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    param_grid: Mapping[str, Sequence[Any]] = field(default_factory=dict)
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "param_grid", dict(self.param_grid))
        if self.kind not in _HYPERPARAMS:
            raise ValidationError(
                f"unknown learner kind '{self.kind}'; expected one of "
                + ", ".join(sorted(_HYPERPARAMS))
            )
        allowed = _HYPERPARAMS[self.kind]
        bad = (set(self.params) | set(self.param_grid)) - allowed
        if bad:
            raise ValidationError(
                f"invalid hyperparameters for {self.kind}: {sorted(bad)}"
            )
        if self.cv_folds < 2:
            raise ValidationError("cv_folds must be >= 2")
        if self.seed < 0:
            raise ValidationError("seed must be unsigned")

    def grid_points(self) -> list[dict[str, Any]]:
        """Cartesian product of the grid, in key/value declaration order.

        An empty grid is a single point taken from the fixed params.
        """
        base = dict(_DEFAULTS[self.kind])
        base.update(self.params)
        if not self.param_grid:
            return [base]
        keys = list(self.param_grid)
        points = []
        for combo in itertools.product(*(self.param_grid[k] for k in keys)):
            point = dict(base)
            point.update(zip(keys, combo))
            points.append(point)
        return points


@dataclass(frozen=True)
class TrainedModel:
    """Fitted learner plus the flattened layout and classes it was trained on.

    Prediction rejects feature sets missing any column of ``layout``;
    columns not in the layout are ignored.
    """

    kind: str
    params: Mapping[str, Any]
    cv_folds: int
    seed: int
    classes: tuple[str, ...]
    layout: tuple[str, ...]
    feature_names: tuple[str, ...]
    n_channels: int
    state: KnnState | Forest
    cv_accuracy: float

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "layout", tuple(self.layout))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def spec(self) -> LearnerSpec:
        """The learner spec with the chosen (post-search) parameters."""
        return LearnerSpec(
            kind=self.kind,
            params=self.params,
            cv_folds=self.cv_folds,
            seed=self.seed,
        )


def train_test_split(
    n: int,
    test_fraction: float,
    seed: int,
    targets: Sequence[str] | None = None,
) -> tuple[list[int], list[int]]:
    """Disjoint (train, test) index lists covering 0..n-1, seeded.

    The test share is round(n * test_fraction); with *targets* the split is
    stratified, each class contributing its rounded share (always leaving at
    least one sample per class on each side).
    """
    if n < 2:
        raise ValidationError("need at least 2 rows to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValidationError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    if targets is None:
        perm = rng.permutation(n)
        n_test = int(np.floor(n * test_fraction + 0.5))
        test = sorted(int(i) for i in perm[:n_test])
        train = sorted(int(i) for i in perm[n_test:])
        return train, test
    if len(targets) != n:
        raise ValidationError("targets length differs from n")
    train: list[int] = []
    test: list[int] = []
    for label in sorted(set(targets)):
        idx = np.array([i for i, t in enumerate(targets) if t == label])
        if idx.size < 2:
            raise ValidationError(
                f"class '{label}' has {idx.size} sample(s); "
                "need >= 2 for a stratified split"
            )
        rng.shuffle(idx)
        n_test = int(np.floor(idx.size * test_fraction + 0.5))
        n_test = min(max(n_test, 1), idx.size - 1)
        test.extend(int(i) for i in idx[:n_test])
        train.extend(int(i) for i in idx[n_test:])
    return sorted(train), sorted(test)


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """K validation-index folds preserving class proportions within +-1.

    Indices of each class are shuffled with the seeded generator and dealt
    round-robin across folds.
    """
    n = len(y)
    if k > n:
        raise ValidationError(f"cv_folds={k} exceeds {n} rows")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in np.unique(y):
        idx = np.nonzero(y == label)[0]
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            folds[j % k].append(int(i))
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def _fit_state(kind, params, x, y, n_classes, seed):
    if kind == "knn":
        return knn_fit(x, y)
    return forest_fit(
        x,
        y,
        n_classes,
        n_estimators=int(params["n_estimators"]),
        seed=seed,
        max_depth=params["max_depth"],
    )


def _predict_proba(kind, params, state, n_classes, x):
    if kind == "knn":
        return knn_predict_proba(state, n_classes, int(params["n_neighbors"]), x)
    return forest_predict_proba(state, x)


def model_from_featureset(fs: FeatureSet, spec: LearnerSpec) -> TrainedModel:
    """Grid-search with stratified CV, then refit the best point on all rows.

    Accuracy per grid point is the mean over ``cv_folds`` folds; ties go to
    the first point in grid order.
    """
    missing = [name for name, t in zip(fs.series_names, fs.targets) if t is None]
    if missing:
        raise ValidationError(
            "feature set rows lack targets: " + ", ".join(missing)
        )
    dm = design_matrix(fs)
    classes = tuple(sorted(set(fs.targets)))
    class_index = {c: i for i, c in enumerate(classes)}
    y = np.array([class_index[t] for t in fs.targets], dtype=np.int64)
    x = dm.data

    folds = stratified_folds(y, spec.cv_folds, spec.seed)
    points = spec.grid_points()
    mean_accuracies = []
    for params in points:
        fold_acc = []
        for fold in folds:
            val_mask = np.zeros(len(y), dtype=bool)
            val_mask[fold] = True
            if not val_mask.any() or val_mask.all():
                continue
            state = _fit_state(
                spec.kind, params, x[~val_mask], y[~val_mask], len(classes), spec.seed
            )
            probs = _predict_proba(
                spec.kind, params, state, len(classes), x[val_mask]
            )
            fold_acc.append(float(np.mean(np.argmax(probs, axis=1) == y[val_mask])))
        mean_accuracies.append(float(np.mean(fold_acc)) if fold_acc else 0.0)

    best = int(np.argmax(mean_accuracies))
    chosen = points[best]
    state = _fit_state(spec.kind, chosen, x, y, len(classes), spec.seed)
    return TrainedModel(
        kind=spec.kind,
        params=chosen,
        cv_folds=spec.cv_folds,
        seed=spec.seed,
        classes=classes,
        layout=dm.column_names,
        feature_names=fs.feature_names,
        n_channels=fs.n_channels,
        state=state,
        cv_accuracy=mean_accuracies[best],
    )


def _layout_matrix(fs: FeatureSet, model: TrainedModel) -> np.ndarray:
    """Select and order the model's layout columns from a feature set."""
    dm = design_matrix(fs, allow_nan=True)
    positions = {c: i for i, c in enumerate(dm.column_names)}
    missing = [c for c in model.layout if c not in positions]
    if missing:
        extra = [c for c in dm.column_names if c not in set(model.layout)]
        detail = f"missing columns: {', '.join(missing)}"
        if extra:
            detail += f"; extra columns present: {', '.join(extra)}"
        raise ValidationError(f"feature set does not match model layout; {detail}")
    data = dm.data[:, [positions[c] for c in model.layout]]
    bad = np.nonzero(np.isnan(data).any(axis=1))[0]
    if bad.size:
        names = ", ".join(fs.series_names[i] for i in bad)
        raise ValidationError(f"rows contain NaN features: {names}")
    return data


def model_predictions(
    fs: FeatureSet, model: TrainedModel, return_probs: bool = False
):
    """Predict labels (or class probability vectors) for every series."""
    x = _layout_matrix(fs, model)
    probs = _predict_proba(
        model.kind, model.params, model.state, len(model.classes), x
    )
    if return_probs:
        return probs
    return [model.classes[i] for i in np.argmax(probs, axis=1)]


@dataclass(frozen=True)
class Predictions:
    """Per-series outcome of a prediction run over data files.

    A series that could not be featurized (or had NaN features) carries an
    error string instead of a label; it is reported, never silently dropped.
    """

    names: tuple[str, ...]
    classes: tuple[str, ...]
    labels: tuple[str | None, ...]
    probs: np.ndarray | None
    errors: tuple[str | None, ...]


def predictions_for_featureset(
    fs: FeatureSet, model: TrainedModel, return_probs: bool = False
) -> Predictions:
    """Predictions record for a featurized set; bad rows are flagged, not dropped.

    A row whose metadata records a featurization error, or whose layout
    columns contain NaN, is reported as unpredictable instead of failing
    the batch.
    """
    dm = design_matrix(fs, allow_nan=True)
    positions = {c: i for i, c in enumerate(dm.column_names)}
    missing = [c for c in model.layout if c not in positions]
    if missing:
        raise ValidationError(
            "feature set does not provide the model layout; missing: "
            + ", ".join(missing)
        )
    sel = [positions[c] for c in model.layout]

    ok_rows: list[int] = []
    errors: list[str | None] = [None] * fs.n_series
    for i in range(fs.n_series):
        meta_err = fs.metadata[i].get("error")
        if meta_err is not None:
            errors[i] = f"unpredictable: {meta_err}"
        elif np.isnan(dm.data[i, sel]).any():
            errors[i] = "unpredictable: NaN features"
        else:
            ok_rows.append(i)

    labels: list[str | None] = [None] * fs.n_series
    probs = None
    if return_probs:
        probs = np.full((fs.n_series, len(model.classes)), np.nan)
    if ok_rows:
        sub = featureset_select(fs, ok_rows)
        sub_probs = model_predictions(sub, model, return_probs=True)
        for row, i in enumerate(ok_rows):
            labels[i] = model.classes[int(np.argmax(sub_probs[row]))]
            if probs is not None:
                probs[i] = sub_probs[row]

    return Predictions(
        names=fs.series_names,
        classes=model.classes,
        labels=tuple(labels),
        probs=probs,
        errors=tuple(errors),
    )


def predict_data_files(
    paths: Sequence[str],
    model: TrainedModel,
    req: FeaturizeRequest | None = None,
    return_probs: bool = False,
) -> Predictions:
    """Featurize files then predict: equals the manual two-step pipeline."""
    if req is None:
        req = FeaturizeRequest(features=model.feature_names)
    fs = featurize_data_files(paths, req)
    return predictions_for_featureset(fs, model, return_probs=return_probs)
