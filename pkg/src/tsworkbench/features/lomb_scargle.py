"""Multi-harmonic least-squares spectral fitting for irregular sampling.

A signal is modeled as a superposition of periodic components.  Each
component is found by scanning a frequency grid: at every candidate
frequency the harmonic amplitudes and a constant offset are solved by
weighted linear least squares, and the frequency with the smallest weighted
residual sum of squares wins.  Components are fitted one at a time on the
residual of the previous stages (prewhitening), so the strongest component
comes first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import ChannelData, ValidationError


class DegenerateSignalError(ValueError):
    """Every candidate frequency produced singular normal equations."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Linearly spaced candidate frequencies, endpoints inclusive."""

    f_min: float
    f_max: float
    n_points: int

    def __post_init__(self):
        if not 0 < self.f_min < self.f_max:
            raise ValidationError(
                f"need 0 < f_min < f_max, got [{self.f_min}, {self.f_max}]"
            )
        if self.n_points < 2:
            raise ValidationError("frequency grid needs at least 2 points")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.n_points)

    @property
    def step(self) -> float:
        return (self.f_max - self.f_min) / (self.n_points - 1)


def default_grid(times: np.ndarray, oversample: int = 5) -> FrequencyGrid:
    """Standard periodogram grid for the given sampling.

    Lowest frequency resolves one cycle over the observation span; highest
    is the pseudo-Nyquist limit for the average sampling rate; the grid
    oversamples the independent frequencies by ``oversample``.
    """
    n = len(times)
    span = float(times[-1] - times[0])
    if span <= 0:
        raise ValidationError("cannot build a frequency grid for zero time span")
    return FrequencyGrid(f_min=1.0 / span, f_max=0.5 * n / span, n_points=oversample * n)


@dataclass(frozen=True)
class LombScargleModel:
    """Fitted periodic-superposition model.

    ``cos_coeffs`` and ``sin_coeffs`` have shape (n_harm, n_freq): row k is
    the k-th harmonic, column l the l-th fitted frequency.  ``chi2_seq``
    holds the weighted residual sum of squares after each prewhitening
    stage; index 0 is the raw signal (variance about the weighted mean), so
    the sequence is non-increasing by construction.
    """

    freqs: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    offsets: np.ndarray
    chi2_seq: np.ndarray

    def __post_init__(self):
        for name in ("freqs", "cos_coeffs", "sin_coeffs", "offsets", "chi2_seq"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.freqs <= 0):
            raise ValidationError("fitted frequencies must be > 0")
        if self.cos_coeffs.shape != self.sin_coeffs.shape:
            raise ValidationError("cos/sin coefficient shapes differ")
        if self.cos_coeffs.shape != (self.n_harm, self.n_freq):
            raise ValidationError("coefficient arrays must be (n_harm, n_freq)")
        if self.chi2_seq.shape != (self.n_freq + 1,):
            raise ValidationError("chi2_seq must have length n_freq + 1")
        if np.any(np.diff(self.chi2_seq) > 1e-9 * max(1.0, self.chi2_seq[0])):
            raise ValidationError("chi2_seq must be non-increasing")

    @property
    def n_freq(self) -> int:
        return int(self.freqs.shape[0])

    @property
    def n_harm(self) -> int:
        return int(self.cos_coeffs.shape[0])

    def predict(self, times: np.ndarray) -> np.ndarray:
        """Evaluate the full fitted model (all stages summed) at *times*."""
        t = np.asarray(times, dtype=np.float64)
        out = np.full(t.shape, float(np.sum(self.offsets)))
        for l in range(self.n_freq):
            phases = 2.0 * np.pi * self.freqs[l] * t
            for k in range(self.n_harm):
                out += self.cos_coeffs[k, l] * np.cos((k + 1) * phases)
                out += self.sin_coeffs[k, l] * np.sin((k + 1) * phases)
        return out


def _design_columns(t: np.ndarray, freq: float, n_harm: int) -> np.ndarray:
    """Columns [cos kft..., sin kft..., 1] for harmonics k = 1..n_harm."""
    k = np.arange(1, n_harm + 1)
    phases = 2.0 * np.pi * freq * np.outer(t, k)
    return np.hstack([np.cos(phases), np.sin(phases), np.ones((len(t), 1))])


def fit_lomb_scargle(
    ch: ChannelData,
    n_freq: int = 1,
    n_harm: int = 4,
    grid: FrequencyGrid | None = None,
) -> LombScargleModel:
    """Fit *n_freq* periodic components of *n_harm* harmonics each.

    Weights are inverse squared measurement errors when present, else
    uniform.  Candidate frequencies with singular normal equations are
    skipped; a signal where every candidate is singular is rejected.
    """
    violations = ch.violations()
    if violations:
        raise ValidationError("; ".join(violations))
    t = ch.time_axis()
    v = ch.values
    n = len(v)
    if n < 2 * n_harm + 2:
        raise ValidationError(
            f"need at least {2 * n_harm + 2} samples for {n_harm} harmonics, got {n}"
        )
    if grid is None:
        grid = default_grid(t)
    w = np.ones(n) if ch.errors is None else 1.0 / np.square(ch.errors)
    sqrt_w = np.sqrt(w)

    wmean = float(np.sum(w * v) / np.sum(w))
    chi2_seq = [float(np.sum(w * np.square(v - wmean)))]
    freqs: list[float] = []
    cos_coeffs = np.empty((n_harm, n_freq))
    sin_coeffs = np.empty((n_harm, n_freq))
    offsets = np.empty(n_freq)

    resid = v.astype(np.float64)
    candidates = grid.frequencies()
    for stage in range(n_freq):
        yw = resid * sqrt_w
        best_rss = math.inf
        best: tuple[float, np.ndarray, np.ndarray] | None = None
        for f in candidates:
            x = _design_columns(t, f, n_harm)
            xw = x * sqrt_w[:, None]
            try:
                beta = np.linalg.solve(xw.T @ xw, xw.T @ yw)
            except np.linalg.LinAlgError:
                continue
            rss = float(np.sum(np.square(yw - xw @ beta)))
            if rss < best_rss:
                best_rss = rss
                best = (float(f), beta, x)
        if best is None:
            raise DegenerateSignalError(
                "degenerate signal: all candidate frequencies singular"
            )
        f, beta, x = best
        freqs.append(f)
        cos_coeffs[:, stage] = beta[:n_harm]
        sin_coeffs[:, stage] = beta[n_harm : 2 * n_harm]
        offsets[stage] = beta[-1]
        resid = resid - x @ beta
        # Guard against negative epsilon from floating-point cancellation.
        chi2_seq.append(min(best_rss, chi2_seq[-1]))

    return LombScargleModel(
        freqs=np.array(freqs),
        cos_coeffs=cos_coeffs,
        sin_coeffs=sin_coeffs,
        offsets=offsets,
        chi2_seq=np.array(chi2_seq),
    )


def _wrap_phase(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    y = math.remainder(x, math.tau)
    if y <= -math.pi:
        y += math.tau
    return y


def lomb_scargle_features(model: LombScargleModel) -> dict[str, float]:
    """Scalar features of a fitted model.

    Per frequency l and harmonic k: ``freq{l}_freq`` is the fitted
    frequency, ``freq{l}_amplitude{k}`` the harmonic amplitude,
    ``freq{l}_rel_phase{k}`` the phase relative to k times the fundamental
    phase (identically 0 for k = 1), and ``freq{l}_signif`` the fraction of
    remaining variance explained at stage l (0 when nothing was left to
    explain).
    """
    out: dict[str, float] = {}
    for l in range(model.n_freq):
        tag = f"freq{l + 1}"
        out[f"{tag}_freq"] = float(model.freqs[l])
        base_phase = math.atan2(model.sin_coeffs[0, l], model.cos_coeffs[0, l])
        for k in range(model.n_harm):
            amp = math.hypot(model.cos_coeffs[k, l], model.sin_coeffs[k, l])
            out[f"{tag}_amplitude{k + 1}"] = amp
            if k == 0:
                rel = 0.0
            else:
                phase = math.atan2(model.sin_coeffs[k, l], model.cos_coeffs[k, l])
                rel = _wrap_phase(phase - (k + 1) * base_phase)
            out[f"{tag}_rel_phase{k + 1}"] = rel
        prev = float(model.chi2_seq[l])
        cur = float(model.chi2_seq[l + 1])
        out[f"{tag}_signif"] = 0.0 if prev <= 0.0 else 1.0 - cur / prev
    return out
