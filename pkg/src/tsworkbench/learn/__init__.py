"""Learners: design-matrix flattening, k-NN and random forest with
cross-validated grid search, training, and prediction."""

from .matrix import DesignMatrix, column_layout, design_matrix
from .model import (
    LearnerSpec,
    Predictions,
    TrainedModel,
    model_from_featureset,
    model_predictions,
    predict_data_files,
    predictions_for_featureset,
    stratified_folds,
    train_test_split,
)
from .neighbors import KnnState, knn_fit, knn_predict_proba
from .trees import (
    Forest,
    Leaf,
    Split,
    forest_fit,
    forest_predict_proba,
    tree_from_jsonable,
    tree_to_jsonable,
)

__all__ = [
    "DesignMatrix",
    "Forest",
    "KnnState",
    "Leaf",
    "LearnerSpec",
    "Predictions",
    "Split",
    "TrainedModel",
    "column_layout",
    "design_matrix",
    "forest_fit",
    "forest_predict_proba",
    "knn_fit",
    "knn_predict_proba",
    "model_from_featureset",
    "model_predictions",
    "predict_data_files",
    "predictions_for_featureset",
    "stratified_folds",
    "train_test_split",
    "tree_from_jsonable",
    "tree_to_jsonable",
]
