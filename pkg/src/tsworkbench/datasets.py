"""Loader for the Bonn EEG seizure dataset (Andrzejak et al. 2001).

The dataset ships as five groups of 100 single-channel recordings (4097
samples each at 173.61 Hz): Z and O from healthy subjects, N and F
interictal, S ictal.  Expected layout under the data directory::

    <root>/Z/Z001.txt ... <root>/S/S100.txt

Set the ``TSWORKBENCH_EEG_DIR`` environment variable (or pass ``root``) to
point at a local copy; the loader never downloads anything by itself.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .core import ChannelData, TimeSeries

SAMPLING_HZ = 173.61
CLASS_GROUPS = ("Z", "O", "N", "F", "S")
GROUP_TARGETS = {
    "Z": "Normal",
    "O": "Normal",
    "N": "Interictal",
    "F": "Interictal",
    "S": "Ictal",
}
ENV_VAR = "TSWORKBENCH_EEG_DIR"


def eeg_data_dir(root: str | Path | None = None) -> Path | None:
    """Directory holding the Z/O/N/F/S groups, or None when unavailable."""
    candidates = []
    if root is not None:
        candidates.append(Path(root))
    env = os.environ.get(ENV_VAR)
    if env:
        candidates.append(Path(env))
    candidates.append(Path.home() / ".cache" / "tsworkbench" / "eeg")
    for cand in candidates:
        if all((cand / g).is_dir() for g in CLASS_GROUPS):
            return cand
    return None


def load_eeg_seizure(root: str | Path | None = None) -> list[TimeSeries]:
    """All 500 recordings in group order Z, O, N, F, S, sorted by filename.

    Raises FileNotFoundError when the dataset is absent; callers that want
    optional behavior should check :func:`eeg_data_dir` first.
    """
    base = eeg_data_dir(root)
    if base is None:
        raise FileNotFoundError(
            f"EEG dataset not found; set ${ENV_VAR} to a directory with "
            f"subdirectories {'/'.join(CLASS_GROUPS)}"
        )
    series: list[TimeSeries] = []
    for group in CLASS_GROUPS:
        files = sorted(
            p for p in (base / group).iterdir()
            if p.suffix.lower() in (".txt", ".dat")
        )
        if not files:
            raise FileNotFoundError(f"no recordings under {base / group}")
        for path in files:
            values = np.loadtxt(path, dtype=np.float64)
            times = np.arange(len(values)) / SAMPLING_HZ
            series.append(
                TimeSeries(
                    name=path.stem,
                    channels=(ChannelData(values=values, times=times),),
                    target=GROUP_TARGETS[group],
                )
            )
    return series
