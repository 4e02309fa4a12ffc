"""Core domain types: time series, feature sets, and their validation.

All types here are immutable after construction and safe to share across
concurrent workers; every operation returns a new value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when an operation receives structurally invalid domain data."""


def _frozen_f64(values, *, allow_none: bool = False) -> np.ndarray | None:
    if values is None:
        if allow_none:
            return None
        raise TypeError("array value must not be None")
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ChannelData:
    """One channel of samples: values with optional times and errors.

    Missing ``times`` means an implicit uniform grid 0, 1, 2, ...; this makes
    regularly sampled data a zero-cost special case.  ``errors`` are
    per-sample measurement uncertainties in the same units as ``values``.
    """

    values: np.ndarray
    times: np.ndarray | None = None
    errors: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_f64(self.values))
        object.__setattr__(self, "times", _frozen_f64(self.times, allow_none=True))
        object.__setattr__(self, "errors", _frozen_f64(self.errors, allow_none=True))

    def __len__(self) -> int:
        return int(self.values.shape[0]) if self.values.ndim else 0

    def time_axis(self) -> np.ndarray:
        """Explicit times, or the implicit 0..N-1 grid when times are absent."""
        if self.times is not None:
            return self.times
        grid = np.arange(len(self), dtype=np.float64)
        grid.setflags(write=False)
        return grid

    def violations(self) -> list[str]:
        """Every invariant violation in this channel (empty list = valid)."""
        out: list[str] = []
        v = self.values
        if v.ndim != 1 or v.shape[0] == 0:
            out.append("values must be a non-empty 1-D array")
            return out
        if not np.all(np.isfinite(v)):
            out.append("values contain non-finite entries")
        t = self.times
        if t is not None:
            if t.ndim != 1 or t.shape[0] != v.shape[0]:
                out.append("times length differs from values length")
            else:
                if not np.all(np.isfinite(t)):
                    out.append("times contain non-finite entries")
                elif t.shape[0] > 1 and not np.all(np.diff(t) > 0):
                    out.append("times not strictly increasing")
        e = self.errors
        if e is not None:
            if e.ndim != 1 or e.shape[0] != v.shape[0]:
                out.append("errors length differs from values length")
            else:
                if not np.all(np.isfinite(e)):
                    out.append("errors contain non-finite entries")
                elif np.any(e <= 0):
                    out.append("errors must be > 0")
        return out


@dataclass(frozen=True)
class TimeSeries:
    """A named, multi-channel sequence with optional class label and metadata.

    Channels may have differing lengths and time grids; each is validated
    independently.
    """

    name: str
    channels: tuple[ChannelData, ...]
    target: str | None = None
    metadata: Mapping[str, str | float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n_channels(self) -> int:
        return len(self.channels)


def validate_time_series(ts: TimeSeries) -> list[str]:
    """Return every invariant violation of *ts* (empty list = valid).

    Violations are data, not failures: this never raises and never mutates
    its input.
    """
    out: list[str] = []
    if not ts.name:
        out.append("name is empty")
    if not ts.channels:
        out.append("channel list is empty")
    for i, ch in enumerate(ts.channels):
        if not isinstance(ch, ChannelData):
            out.append(f"channel {i}: not a ChannelData")
            continue
        out.extend(f"channel {i}: {msg}" for msg in ch.violations())
    for key, value in ts.metadata.items():
        if not isinstance(key, str):
            out.append(f"metadata key {key!r} is not a string")
        if not isinstance(value, (str, float, int)) or isinstance(value, bool):
            out.append(f"metadata value for {key!r} must be string or float")
    if ts.target is not None and not isinstance(ts.target, str):
        out.append("target must be a string label or absent")
    return out


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """3-D table of feature values: [series][channel][feature].

    NaN marks "not computed"; every non-NaN entry must be finite.  Targets
    and per-series metadata ride along with the rows, making the set a
    self-describing unit of persistence and model input.
    """

    series_names: tuple[str, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray
    targets: tuple[str | None, ...] = ()
    metadata: tuple[Mapping[str, str | float], ...] = ()

    def __post_init__(self):
        names = tuple(self.series_names)
        feats = tuple(self.feature_names)
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 3:
            raise ValidationError(f"values must be 3-D, got {vals.ndim}-D")
        if vals.shape[0] != len(names) or vals.shape[2] != len(feats):
            raise ValidationError(
                f"values shape {vals.shape} does not match "
                f"{len(names)} series x {len(feats)} features"
            )
        if len(set(names)) != len(names):
            raise ValidationError("duplicate series names")
        if len(set(feats)) != len(feats):
            raise ValidationError("duplicate feature names")
        if np.isinf(vals).any():
            raise ValidationError("feature values contain infinities")
        targets = tuple(self.targets) if self.targets else (None,) * len(names)
        if len(targets) != len(names):
            raise ValidationError("targets length differs from series count")
        meta = tuple(dict(m) for m in self.metadata) if self.metadata else tuple(
            {} for _ in names
        )
        if len(meta) != len(names):
            raise ValidationError("metadata length differs from series count")
        vals.setflags(write=False)
        object.__setattr__(self, "series_names", names)
        object.__setattr__(self, "feature_names", feats)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "metadata", meta)

    @property
    def n_series(self) -> int:
        return len(self.series_names)

    @property
    def n_channels(self) -> int:
        return int(self.values.shape[1])

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureSet):
            return NotImplemented
        return (
            self.series_names == other.series_names
            and self.feature_names == other.feature_names
            and self.targets == other.targets
            and self.metadata == other.metadata
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def select(self, series_indices: Sequence[int]) -> "FeatureSet":
        return featureset_select(self, series_indices)


def featureset_select(fs: FeatureSet, series_indices: Sequence[int]) -> FeatureSet:
    """New FeatureSet with rows in the given order; other axes unchanged.

    Targets and metadata follow their rows.  Indices must be in range and
    free of duplicates.
    """
    idx = [int(i) for i in series_indices]
    for i in idx:
        if not 0 <= i < fs.n_series:
            raise ValidationError(f"index {i} out of range for {fs.n_series} series")
    if len(set(idx)) != len(idx):
        raise ValidationError("duplicate series indices")
    return FeatureSet(
        series_names=tuple(fs.series_names[i] for i in idx),
        feature_names=fs.feature_names,
        values=fs.values[idx],
        targets=tuple(fs.targets[i] for i in idx),
        metadata=tuple(fs.metadata[i] for i in idx),
    )
