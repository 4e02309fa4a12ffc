"""File formats and workflow recording: CSV readers, binary archives for
feature sets and models, prediction files, and replayable recipes."""

from .archive import (
    ArchiveError,
    ChecksumMismatchError,
    DimensionMismatchError,
    SchemaVersionError,
    TruncatedArchiveError,
    load_featureset,
    load_model,
    load_predictions,
    save_featureset,
    save_model,
    save_predictions,
)
from .recipe import (
    Action,
    ReplayEntry,
    ReplayReport,
    WorkflowRecipe,
    build_model_action,
    export_recipe_script,
    featurize_action,
    file_hash,
    predict_action,
    record_action,
    replay_recipe,
    upload_action,
)
from .series_csv import CsvFormatError, read_time_series_csv, write_time_series_csv

__all__ = [
    "Action",
    "ArchiveError",
    "ChecksumMismatchError",
    "CsvFormatError",
    "DimensionMismatchError",
    "ReplayEntry",
    "ReplayReport",
    "SchemaVersionError",
    "TruncatedArchiveError",
    "WorkflowRecipe",
    "build_model_action",
    "export_recipe_script",
    "featurize_action",
    "file_hash",
    "load_featureset",
    "load_model",
    "load_predictions",
    "predict_action",
    "read_time_series_csv",
    "record_action",
    "replay_recipe",
    "save_featureset",
    "save_model",
    "save_predictions",
    "upload_action",
    "write_time_series_csv",
]
