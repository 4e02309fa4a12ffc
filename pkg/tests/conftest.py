"""Shared fixtures and generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from tsworkbench import ChannelData, FeatureSet, TimeSeries


def random_channel(
    rng: np.random.Generator,
    n: int | None = None,
    with_errors: bool | None = None,
    irregular: bool | None = None,
    scale: float = 100.0,
) -> ChannelData:
    """A valid random channel; options default to coin flips."""
    if n is None:
        n = int(rng.integers(2, 1001))
    if with_errors is None:
        with_errors = bool(rng.integers(2))
    if irregular is None:
        irregular = bool(rng.integers(2))
    values = rng.uniform(-scale, scale, n)
    times = None
    if irregular:
        times = np.sort(rng.uniform(0.0, n, n))
        while n > 1 and np.any(np.diff(times) <= 0):
            times = np.sort(rng.uniform(0.0, n, n))
    errors = rng.uniform(0.1, 3.0, n) if with_errors else None
    return ChannelData(values=values, times=times, errors=errors)


def random_series(rng: np.random.Generator, name: str, n_channels: int = 1,
                  target: str | None = None, **kwargs) -> TimeSeries:
    channels = tuple(random_channel(rng, **kwargs) for _ in range(n_channels))
    return TimeSeries(name=name, channels=channels, target=target)


def random_featureset(rng: np.random.Generator, n_series: int = 6,
                      n_channels: int = 2, n_features: int = 4) -> FeatureSet:
    values = rng.normal(size=(n_series, n_channels, n_features)) * 10
    # Sprinkle some not-computed cells.
    nan_mask = rng.random(values.shape) < 0.1
    values[nan_mask] = np.nan
    names = tuple(f"s{i:03d}" for i in range(n_series))
    feats = tuple(f"f{i}" for i in range(n_features))
    targets = tuple(rng.choice(["a", "b", "c"]) for _ in range(n_series))
    metadata = tuple(
        {"source": f"gen{i}", "gain": float(rng.uniform(0, 2))}
        for i in range(n_series)
    )
    return FeatureSet(
        series_names=names,
        feature_names=feats,
        values=values,
        targets=targets,
        metadata=metadata,
    )


def blob_featureset(
    rng: np.random.Generator,
    n_per_class: int = 20,
    centers=((0.0, 0.0), (10.0, 10.0)),
    spread: float = 0.5,
) -> FeatureSet:
    """Linearly separable Gaussian blobs with margin far above spread."""
    rows = []
    targets = []
    names = []
    for c, center in enumerate(centers):
        pts = rng.normal(loc=center, scale=spread, size=(n_per_class, len(center)))
        rows.append(pts)
        targets.extend([f"class{c}"] * n_per_class)
        names.extend(f"blob{c}_{i}" for i in range(n_per_class))
    data = np.vstack(rows)[:, None, :]
    feats = tuple(f"x{i}" for i in range(data.shape[2]))
    return FeatureSet(
        series_names=tuple(names),
        feature_names=feats,
        values=data,
        targets=tuple(targets),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


# -- acceptance summary ----------------------------------------------------

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        mark = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            outcome, outcome.upper()
        )
        terminalreporter.write_line(f"{mark}  {name}")
