"""Builtin feature catalog: summary statistics, error-weighted statistics,
spectral features from the multi-harmonic periodic fit, and Haar band
decomposition.

Features are defined as graph nodes: a name, the nodes it consumes, and a
pure eval function.  The catalog is enumerable at runtime so the CLI and
the workflow service can list names, descriptions, and parameter schemas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Any, Callable, Mapping

from ..core import ChannelData
from . import summary
from .lomb_scargle import (
    DegenerateSignalError,
    FrequencyGrid,
    LombScargleModel,
    default_grid,
    fit_lomb_scargle,
    lomb_scargle_features,
)
from .summary import FeatureInputError
from .wavelet import haar_wavedec, haar_waverec

__all__ = [
    "CatalogEntry",
    "ParamSpec",
    "DegenerateSignalError",
    "FeatureInputError",
    "FrequencyGrid",
    "LombScargleModel",
    "builtin_defs",
    "builtin_feature",
    "default_grid",
    "feature_catalog",
    "fit_lomb_scargle",
    "haar_wavedec",
    "haar_waverec",
    "lomb_scargle_features",
]

MODEL_NODE = "lomb_scargle_model"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # "int" | "float"
    default: Any


@dataclass(frozen=True)
class CatalogEntry:
    """One listable feature: name, what it computes, and its parameters."""

    name: str
    description: str
    params: tuple[ParamSpec, ...] = ()
    param_group: str | None = None


_SUMMARY_DEFS: dict[str, tuple[tuple[str, ...], Callable]] = {
    "mean": (("values",), summary.mean),
    "std": (("values",), summary.std),
    "mean2": (("values",), summary.mean2),
    "skew": (("values",), summary.skew),
    "abs_diffs": (("values",), summary.abs_diffs),
    "maximum": (("values",), summary.maximum),
    "minimum": (("values",), summary.minimum),
    "median": (("values",), summary.median),
    "amplitude": (("maximum", "minimum"), summary.amplitude),
    "median_absolute_deviation": (
        ("values", "median"),
        summary.median_absolute_deviation,
    ),
    "max_slope": (("times", "values"), summary.max_slope),
    "percent_beyond_1_std": (
        ("values", "mean", "std"),
        summary.percent_beyond_1_std,
    ),
    "percent_close_to_median": (
        ("values", "median", "maximum", "minimum"),
        summary.percent_close_to_median,
    ),
    "weighted_average": (("values", "errors"), summary.weighted_average),
    "weighted_std": (
        ("values", "errors", "weighted_average"),
        summary.weighted_std,
    ),
    "total_time": (("times",), summary.total_time),
}

_SUMMARY_DESCRIPTIONS = {
    "mean": "arithmetic mean of the values",
    "std": "population standard deviation",
    "mean2": "mean of the squared values",
    "skew": "population skewness (0 for constant signals)",
    "abs_diffs": "sum of absolute consecutive differences",
    "maximum": "largest value",
    "minimum": "smallest value",
    "median": "median value",
    "amplitude": "half the peak-to-peak range",
    "median_absolute_deviation": "median absolute deviation from the median",
    "max_slope": "largest absolute slope between consecutive samples",
    "percent_beyond_1_std": "fraction of points more than one std from the mean",
    "percent_close_to_median": "fraction of points within a window of the median",
    "weighted_average": "inverse-variance weighted mean (mean when no errors)",
    "weighted_std": "inverse-variance weighted std (std when no errors)",
    "total_time": "observation time span",
}

_LS_PARAMS = (
    ParamSpec("n_freq", "int", 1),
    ParamSpec("n_harm", "int", 4),
    ParamSpec("f_min", "float", None),
    ParamSpec("f_max", "float", None),
    ParamSpec("n_points", "int", None),
)


def _fit_model_node(t, v, e, *, n_freq, n_harm, f_min, f_max, n_points):
    grid = None
    if f_min is not None or f_max is not None or n_points is not None:
        auto = default_grid(t)
        grid = FrequencyGrid(
            f_min if f_min is not None else auto.f_min,
            f_max if f_max is not None else auto.f_max,
            int(n_points) if n_points is not None else auto.n_points,
        )
    return fit_lomb_scargle(
        ChannelData(values=v, times=t, errors=e), n_freq, n_harm, grid
    )


def _ls_extract(model: LombScargleModel, key: str) -> float:
    return lomb_scargle_features(model)[key]


def _ls_feature_names(n_freq: int, n_harm: int) -> list[str]:
    names = []
    for l in range(1, n_freq + 1):
        names.append(f"freq{l}_freq")
        names.extend(f"freq{l}_amplitude{k}" for k in range(1, n_harm + 1))
        names.extend(f"freq{l}_rel_phase{k}" for k in range(1, n_harm + 1))
        names.append(f"freq{l}_signif")
    return names


def _resolve_params(
    params: Mapping[str, Mapping[str, Any]] | None,
) -> tuple[dict[str, Any], float]:
    params = params or {}
    ls = dict(params.get("lomb_scargle", {}))
    ls_kwargs = {
        "n_freq": int(ls.pop("n_freq", 1)),
        "n_harm": int(ls.pop("n_harm", 4)),
        "f_min": ls.pop("f_min", None),
        "f_max": ls.pop("f_max", None),
        "n_points": ls.pop("n_points", None),
    }
    if ls:
        raise ValueError(f"unknown lomb_scargle parameters: {sorted(ls)}")
    pcm = dict(params.get("percent_close_to_median", {}))
    window_frac = float(pcm.pop("window_frac", 0.1))
    if pcm:
        raise ValueError(f"unknown percent_close_to_median parameters: {sorted(pcm)}")
    known = {"lomb_scargle", "percent_close_to_median"}
    extra = set(params) - known
    if extra:
        raise ValueError(f"parameters given for non-parameterized features: {sorted(extra)}")
    return ls_kwargs, window_frac


def builtin_defs(
    params: Mapping[str, Mapping[str, Any]] | None = None,
) -> dict[str, tuple[tuple[str, ...], Callable]]:
    """Builtin node definitions (name -> (deps, eval)) for the given params.

    Includes the shared internal model node that every ``freq*`` feature
    depends on, so requesting several spectral features fits the model once.
    """
    ls_kwargs, window_frac = _resolve_params(params)
    defs = dict(_SUMMARY_DEFS)
    if window_frac != 0.1:
        defs["percent_close_to_median"] = (
            ("values", "median", "maximum", "minimum"),
            partial(summary.percent_close_to_median, window_frac=window_frac),
        )
    defs[MODEL_NODE] = (
        ("times", "values", "errors"),
        partial(_fit_model_node, **ls_kwargs),
    )
    for name in _ls_feature_names(ls_kwargs["n_freq"], ls_kwargs["n_harm"]):
        defs[name] = ((MODEL_NODE,), partial(_ls_extract, key=name))
    return defs


def feature_catalog(
    params: Mapping[str, Mapping[str, Any]] | None = None,
) -> list[CatalogEntry]:
    """Enumerate the builtin features (excluding internal model nodes)."""
    ls_kwargs, _ = _resolve_params(params)
    entries = []
    for name in _SUMMARY_DEFS:
        specs: tuple[ParamSpec, ...] = ()
        group = None
        if name == "percent_close_to_median":
            specs = (ParamSpec("window_frac", "float", 0.1),)
            group = "percent_close_to_median"
        entries.append(
            CatalogEntry(name, _SUMMARY_DESCRIPTIONS[name], specs, group)
        )
    ls_descriptions = {
        "freq": "fitted frequency of periodic component {l}",
        "amplitude": "amplitude of harmonic {k} at frequency {l}",
        "rel_phase": "phase of harmonic {k} relative to the fundamental at frequency {l}",
        "signif": "fraction of remaining variance explained at stage {l}",
    }
    for name in _ls_feature_names(ls_kwargs["n_freq"], ls_kwargs["n_harm"]):
        parts = name.split("_", 1)
        l = parts[0].removeprefix("freq")
        rest = parts[1]
        kind = rest.rstrip("0123456789")
        k = rest[len(kind):]
        desc = ls_descriptions[kind].format(l=l, k=k)
        entries.append(CatalogEntry(name, desc, _LS_PARAMS, "lomb_scargle"))
    return entries


def builtin_feature(
    name: str,
    ch: ChannelData,
    params: Mapping[str, Mapping[str, Any]] | None = None,
) -> float:
    """Compute a single builtin feature for one channel."""
    from ..graph import NodeExecutionError, build_graph, execute

    graph = build_graph([name], params=params)
    try:
        return float(execute(graph, ch)[name])
    except NodeExecutionError as exc:
        raise exc.cause from None
