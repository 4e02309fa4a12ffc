"""Flattening feature sets into the dense rectangular form learners need."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import FeatureSet, ValidationError


@dataclass(frozen=True)
class DesignMatrix:
    """Rows follow the feature set's series order; columns are ordered
    (feature, channel) pairs, feature-major then channel."""

    data: np.ndarray
    column_names: tuple[str, ...]
    row_names: tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "row_names", tuple(self.row_names))


def column_layout(feature_names, n_channels: int) -> tuple[str, ...]:
    """Column names: bare feature name when C = 1, else ``feature_ch{c}``."""
    if n_channels == 1:
        return tuple(feature_names)
    return tuple(
        f"{f}_ch{c}" for f in feature_names for c in range(n_channels)
    )


def design_matrix(fs: FeatureSet, allow_nan: bool = False) -> DesignMatrix:
    """Flatten a FeatureSet; rows containing NaN are rejected with names."""
    n, c, f = fs.values.shape
    data = np.transpose(fs.values, (0, 2, 1)).reshape(n, f * c)
    if not allow_nan:
        bad = np.nonzero(np.isnan(data).any(axis=1))[0]
        if bad.size:
            names = ", ".join(fs.series_names[i] for i in bad)
            raise ValidationError(f"rows contain NaN features: {names}")
    return DesignMatrix(
        data=data,
        column_names=column_layout(fs.feature_names, c),
        row_names=fs.series_names,
    )
