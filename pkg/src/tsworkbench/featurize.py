"""Batch featurization: apply a feature graph to many series in parallel.

Work is distributed per series across a fixed-size pool of forked worker
processes; results are assembled by input index, so the output is
bit-identical for any worker count.  A feature failing on one series
records NaN for that cell and a warning rather than failing the batch.
"""

from __future__ import annotations

import os
import threading
import warnings
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .core import FeatureSet, TimeSeries, ValidationError, validate_time_series
from .graph import CustomDef, FeatureGraph, build_graph, execute


class FeaturizationWarning(UserWarning):
    """A feature could not be computed for some series/channel cell."""


@dataclass(frozen=True)
class FeaturizeRequest:
    """What to compute and with how many workers."""

    features: tuple[str, ...]
    custom_defs: Mapping[str, CustomDef] = field(default_factory=dict)
    parallelism: int | str = 1
    params: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "custom_defs", dict(self.custom_defs))
        object.__setattr__(self, "params", dict(self.params))
        if not self.features:
            raise ValidationError("feature list is empty")
        if len(set(self.features)) != len(self.features):
            raise ValidationError("duplicate feature names in request")
        if self.parallelism != "auto":
            if not isinstance(self.parallelism, int) or self.parallelism < 1:
                raise ValidationError("parallelism must be >= 1 or 'auto'")

    def n_workers(self) -> int:
        if self.parallelism == "auto":
            return os.cpu_count() or 1
        return int(self.parallelism)

    def graph(self) -> FeatureGraph:
        return build_graph(self.features, self.custom_defs, self.params)


# Forked workers inherit this snapshot; the lock serializes the window
# between assignment and pool creation for concurrent callers.
_worker_env: dict[str, Any] = {}
_worker_env_lock = threading.Lock()


def _series_row(graph: FeatureGraph, ts: TimeSeries, n_features: int):
    """Feature values for one series: (n_channels, n_features) plus issues."""
    row = np.full((ts.n_channels, n_features), np.nan)
    issues: list[str] = []
    for c, ch in enumerate(ts.channels):
        failures: dict[str, str] = {}
        out = execute(graph, ch, failures=failures)
        for j, name in enumerate(graph.outputs):
            if name in out:
                value = out[name]
                if np.isscalar(value) and np.isfinite(value):
                    row[c, j] = float(value)
                else:
                    issues.append(
                        f"feature '{name}' on series '{ts.name}' channel {c}: "
                        "non-finite or non-scalar result"
                    )
            else:
                issues.append(
                    f"feature '{name}' on series '{ts.name}' channel {c}: "
                    + failures.get(name, "not computed")
                )
    return row, issues


def _run_series_task(idx: int):
    env = _worker_env
    ts = env["series"][idx]
    row, issues = _series_row(env["graph"], ts, env["n_features"])
    return idx, row, issues


def _run_path_task(idx: int):
    from .persist import read_time_series_csv

    env = _worker_env
    path = env["paths"][idx]
    try:
        ts = read_time_series_csv(path)
    except Exception as exc:
        return idx, None, None, [], f"{path}: {exc}"
    if ts.n_channels != env["n_channels"]:
        return idx, None, None, [], (
            f"{path}: has {ts.n_channels} channels, expected {env['n_channels']}"
        )
    row, issues = _series_row(env["graph"], ts, env["n_features"])
    return idx, (ts.target, dict(ts.metadata)), row, issues, None


def _map_tasks(task_fn, n_tasks: int, env: dict[str, Any], workers: int):
    """Run index tasks through a forked pool (or inline for one worker)."""
    if workers <= 1 or n_tasks <= 1:
        prev = dict(_worker_env)
        _worker_env.clear()
        _worker_env.update(env)
        try:
            return [task_fn(i) for i in range(n_tasks)]
        finally:
            _worker_env.clear()
            _worker_env.update(prev)
    ctx = get_context("fork")
    with _worker_env_lock:
        _worker_env.clear()
        _worker_env.update(env)
        pool = ctx.Pool(processes=min(workers, n_tasks))
    try:
        chunk = max(1, n_tasks // (workers * 8))
        return pool.map(task_fn, range(n_tasks), chunksize=chunk)
    finally:
        pool.terminate()
        pool.join()
        _worker_env.clear()


def featurize_time_series(
    series: Sequence[TimeSeries], req: FeaturizeRequest
) -> FeatureSet:
    """FeatureSet with one row per series, one slice per channel.

    Row, channel, and feature ordering are pure functions of the input
    order, channel index, and requested-feature order; the result is
    independent of worker count and scheduling.
    """
    series = list(series)
    if not series:
        raise ValidationError("no time series given")
    names = [ts.name for ts in series]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate series names")
    for ts in series:
        violations = validate_time_series(ts)
        if violations:
            raise ValidationError(f"series '{ts.name}': " + "; ".join(violations))
    n_channels = series[0].n_channels
    mismatched = [ts.name for ts in series if ts.n_channels != n_channels]
    if mismatched:
        raise ValidationError(
            f"all series must share channel count {n_channels}; "
            f"differs for: {', '.join(mismatched)}"
        )

    graph = req.graph()
    n_features = len(graph.outputs)
    env = {"graph": graph, "series": series, "n_features": n_features}
    results = _map_tasks(_run_series_task, len(series), env, req.n_workers())

    values = np.full((len(series), n_channels, n_features), np.nan)
    for idx, row, issues in results:
        values[idx] = row
        for msg in issues:
            warnings.warn(msg, FeaturizationWarning, stacklevel=2)

    return FeatureSet(
        series_names=tuple(names),
        feature_names=tuple(graph.outputs),
        values=values,
        targets=tuple(ts.target for ts in series),
        metadata=tuple(ts.metadata for ts in series),
    )


def featurize_data_files(
    paths: Sequence[str | Path],
    req: FeaturizeRequest,
    targets: Mapping[str, str] | None = None,
) -> FeatureSet:
    """Featurize files without an up-front bulk load: workers read their own.

    Equivalent to loading every file and calling
    :func:`featurize_time_series`; rows follow path order.  An unreadable or
    corrupt file yields an all-NaN row whose metadata records the error;
    more than 50% failures fail the whole call.
    """
    paths = [str(p) for p in paths]
    if not paths:
        raise ValidationError("no input paths given")
    names = [Path(p).stem for p in paths]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate series names derived from paths")

    graph = req.graph()
    n_features = len(graph.outputs)

    # Channel count comes from the first readable file; the rest must agree.
    from .persist import read_time_series_csv

    n_channels = None
    for p in paths:
        try:
            n_channels = read_time_series_csv(p).n_channels
            break
        except Exception:
            continue
    if n_channels is None:
        raise ValidationError("no input file could be read")

    env = {
        "graph": graph,
        "paths": paths,
        "n_features": n_features,
        "n_channels": n_channels,
    }
    results = _map_tasks(_run_path_task, len(paths), env, req.n_workers())

    values = np.full((len(paths), n_channels, n_features), np.nan)
    row_targets: list[str | None] = [None] * len(paths)
    row_meta: list[dict] = [{} for _ in paths]
    failures = 0
    for idx, series_info, row, issues, file_error in results:
        if file_error is not None:
            failures += 1
            row_meta[idx] = {"error": file_error}
            warnings.warn(file_error, FeaturizationWarning, stacklevel=2)
            continue
        values[idx] = row
        row_targets[idx], row_meta[idx] = series_info
        for msg in issues:
            warnings.warn(msg, FeaturizationWarning, stacklevel=2)
    if failures * 2 > len(paths):
        raise ValidationError(
            f"{failures} of {len(paths)} input files failed to featurize"
        )
    if targets:
        for i, name in enumerate(names):
            if name in targets:
                row_targets[i] = targets[name]

    return FeatureSet(
        series_names=tuple(names),
        feature_names=tuple(graph.outputs),
        values=values,
        targets=tuple(row_targets),
        metadata=tuple(row_meta),
    )
