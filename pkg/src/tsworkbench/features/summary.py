"""Summary-statistic feature functions.

Every function returns a finite float64 scalar.  Moments are population
(bias-uncorrected) moments; formulas that degenerate (constant signals,
missing errors) return the documented fallback instead of NaN.
"""

from __future__ import annotations

import numpy as np


class FeatureInputError(ValueError):
    """A feature cannot be computed for the given channel (e.g. too short)."""


def mean(v: np.ndarray) -> float:
    return float(np.mean(v))


def std(v: np.ndarray) -> float:
    """Population standard deviation (ddof = 0)."""
    return float(np.std(v))


def mean2(v: np.ndarray) -> float:
    """Mean of the squared values."""
    return float(np.mean(np.square(v)))


def skew(v: np.ndarray) -> float:
    """Population skewness (third standardized moment, bias-uncorrected).

    Constant signals have zero second moment; the skew of a constant signal
    is defined as 0.0.
    """
    centered = v - np.mean(v)
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        return 0.0
    m3 = float(np.mean(centered**3))
    return m3 / m2**1.5


def abs_diffs(v: np.ndarray) -> float:
    """Sum of absolute consecutive differences."""
    if len(v) < 2:
        raise FeatureInputError("abs_diffs needs >= 2 samples")
    return float(np.sum(np.abs(np.diff(v))))


def maximum(v: np.ndarray) -> float:
    return float(np.max(v))


def minimum(v: np.ndarray) -> float:
    return float(np.min(v))


def median(v: np.ndarray) -> float:
    return float(np.median(v))


def amplitude(mx: float, mn: float) -> float:
    """Half the peak-to-peak range."""
    return (mx - mn) / 2.0


def median_absolute_deviation(v: np.ndarray, med: float) -> float:
    return float(np.median(np.abs(v - med)))


def max_slope(t: np.ndarray, v: np.ndarray) -> float:
    """Largest absolute slope between consecutive samples."""
    if len(v) < 2:
        raise FeatureInputError("max_slope needs >= 2 samples")
    dt = np.diff(t)
    if np.any(dt == 0):
        raise FeatureInputError("max_slope needs distinct times")
    return float(np.max(np.abs(np.diff(v) / dt)))


def percent_beyond_1_std(v: np.ndarray, mu: float, sigma: float) -> float:
    """Fraction of points farther than one (unweighted) std from the mean."""
    return float(np.mean(np.abs(v - mu) > sigma))


def percent_close_to_median(
    v: np.ndarray, med: float, mx: float, mn: float, window_frac: float = 0.1
) -> float:
    """Fraction of points within ``window_frac * (max - min)`` of the median.

    A zero-range signal returns 1.0: all points equal the median.
    """
    window = window_frac * (mx - mn)
    if window == 0.0:
        return 1.0
    return float(np.mean(np.abs(v - med) <= window))


def weighted_average(v: np.ndarray, e: np.ndarray | None) -> float:
    """Inverse-variance weighted mean; plain mean when errors are absent."""
    if e is None:
        return float(np.mean(v))
    w = 1.0 / np.square(e)
    return float(np.sum(w * v) / np.sum(w))


def weighted_std(v: np.ndarray, e: np.ndarray | None, wavg: float) -> float:
    """Inverse-variance weighted population std; plain std when errors absent."""
    if e is None:
        return float(np.std(v))
    w = 1.0 / np.square(e)
    return float(np.sqrt(np.sum(w * np.square(v - wavg)) / np.sum(w)))


def total_time(t: np.ndarray) -> float:
    """Observation time span (0.0 for a single sample)."""
    return float(t[-1] - t[0])
