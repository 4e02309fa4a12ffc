"""Multilevel Haar analysis and synthesis filters.

Used to split a signal into frequency bands that are then featurized as
separate channels.  Odd-length inputs are padded by repeating the last
sample before each analysis step; coefficient equality with other
libraries' padding modes is a non-goal.
"""

from __future__ import annotations

import numpy as np

_SQRT2 = np.sqrt(2.0)


def haar_wavedec(values, level: int) -> list[np.ndarray]:
    """Decompose into ``level + 1`` bands: [approx_L, detail_L, ..., detail_1].

    Each analysis step halves the (padded) signal: approx holds pairwise
    scaled sums, detail pairwise scaled differences.  Every step needs at
    least 2 samples to filter, which bounds the usable level for short
    inputs.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("input must be a non-empty 1-D array")
    if level < 1:
        raise ValueError("level must be >= 1")
    details: list[np.ndarray] = []
    approx = v
    for step in range(level):
        if approx.size < 2:
            raise ValueError(
                f"input too short for level {level}: "
                f"{approx.size} sample(s) left at step {step + 1}"
            )
        if approx.size % 2:
            approx = np.append(approx, approx[-1])
        even, odd = approx[0::2], approx[1::2]
        details.append((even - odd) / _SQRT2)
        approx = (even + odd) / _SQRT2
    return [approx] + details[::-1]


def haar_waverec(bands: list[np.ndarray]) -> np.ndarray:
    """Inverse of :func:`haar_wavedec` for inputs that needed no padding.

    When analysis padded at some level, the reconstruction reproduces the
    padded signal (an approx band one sample longer than its detail band is
    truncated to match, mirroring the analysis-side padding).
    """
    if len(bands) < 2:
        raise ValueError("need an approximation band and at least one detail band")
    approx = np.asarray(bands[0], dtype=np.float64)
    for detail in bands[1:]:
        detail = np.asarray(detail, dtype=np.float64)
        if approx.size == detail.size + 1:
            approx = approx[: detail.size]
        if approx.size != detail.size:
            raise ValueError(
                f"band sizes inconsistent: {approx.size} approx vs {detail.size} detail"
            )
        out = np.empty(2 * detail.size)
        out[0::2] = (approx + detail) / _SQRT2
        out[1::2] = (approx - detail) / _SQRT2
        approx = out
    return approx
