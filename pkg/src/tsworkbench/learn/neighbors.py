"""Exact k-nearest-neighbors classification.

Distances are exact Euclidean; neighbor ties at equal distance go to the
lower training-row index, and vote ties to the earlier class in the class
vocabulary, so predictions are fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ValidationError


@dataclass(frozen=True)
class KnnState:
    """Stored training matrix and integer class labels."""

    train_x: np.ndarray
    train_y: np.ndarray

    def __post_init__(self):
        x = np.array(self.train_x, dtype=np.float64)
        y = np.array(self.train_y, dtype=np.int64)
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "train_x", x)
        object.__setattr__(self, "train_y", y)


def knn_fit(x: np.ndarray, y: np.ndarray) -> KnnState:
    return KnnState(train_x=x, train_y=y)


def knn_predict_proba(
    state: KnnState, n_classes: int, n_neighbors: int, x: np.ndarray
) -> np.ndarray:
    """Neighbor vote fractions, shape (n_queries, n_classes)."""
    n_train = state.train_x.shape[0]
    if n_neighbors > n_train:
        raise ValidationError(
            f"n_neighbors={n_neighbors} exceeds {n_train} training rows"
        )
    x = np.asarray(x, dtype=np.float64)
    probs = np.zeros((x.shape[0], n_classes))
    train_idx = np.arange(n_train)
    for i, q in enumerate(x):
        d2 = np.sum(np.square(state.train_x - q), axis=1)
        order = np.lexsort((train_idx, d2))[:n_neighbors]
        votes = np.bincount(state.train_y[order], minlength=n_classes)
        probs[i] = votes / n_neighbors
    return probs
