"""tsworkbench: end-to-end time-series inference.

Extract statistical and spectral features from (possibly irregularly
sampled, multi-channel, error-bearing) time series through a memoizing
computation graph, build classification models from the resulting feature
sets, generate predictions, and drive the whole workflow from the CLI or
the job-dispatching HTTP service.
"""

from .core import (
    ChannelData,
    FeatureSet,
    TimeSeries,
    ValidationError,
    featureset_select,
    validate_time_series,
)
from .featurize import (
    FeaturizationWarning,
    FeaturizeRequest,
    featurize_data_files,
    featurize_time_series,
)
from .features import (
    FrequencyGrid,
    LombScargleModel,
    builtin_feature,
    feature_catalog,
    fit_lomb_scargle,
    haar_wavedec,
    haar_waverec,
    lomb_scargle_features,
)
from .graph import FeatureGraph, Node, build_graph, execute
from .learn import (
    DesignMatrix,
    LearnerSpec,
    Predictions,
    TrainedModel,
    design_matrix,
    model_from_featureset,
    model_predictions,
    predict_data_files,
    train_test_split,
)
from .persist import (
    WorkflowRecipe,
    export_recipe_script,
    load_featureset,
    load_model,
    read_time_series_csv,
    record_action,
    replay_recipe,
    save_featureset,
    save_model,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelData",
    "DesignMatrix",
    "FeatureGraph",
    "FeatureSet",
    "FeaturizationWarning",
    "FeaturizeRequest",
    "FrequencyGrid",
    "LearnerSpec",
    "LombScargleModel",
    "Node",
    "Predictions",
    "TimeSeries",
    "TrainedModel",
    "ValidationError",
    "WorkflowRecipe",
    "build_graph",
    "builtin_feature",
    "design_matrix",
    "execute",
    "export_recipe_script",
    "feature_catalog",
    "featureset_select",
    "featurize_data_files",
    "featurize_time_series",
    "fit_lomb_scargle",
    "haar_wavedec",
    "haar_waverec",
    "load_featureset",
    "load_model",
    "lomb_scargle_features",
    "model_from_featureset",
    "model_predictions",
    "predict_data_files",
    "read_time_series_csv",
    "record_action",
    "replay_recipe",
    "save_featureset",
    "save_model",
    "train_test_split",
    "validate_time_series",
]
