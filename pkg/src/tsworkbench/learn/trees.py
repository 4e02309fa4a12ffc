"""CART decision trees and bagged random forests, from first principles.

Kept deliberately self-contained so seeded training is reproducible
bitwise: per-tree bootstrap samples and per-split column subsets come from
generators spawned off one seed, splits minimize Gini impurity, and every
tie-break is fixed (first-encountered threshold at equal Gini, earlier
class at equal votes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Leaf:
    """Terminal node holding per-class training sample counts."""

    counts: tuple[float, ...]


@dataclass(frozen=True)
class Split:
    """Internal node: rows with column value <= threshold go left."""

    column: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class Forest:
    trees: tuple[TreeNode, ...]
    n_classes: int


def _best_split(x, y_onehot, columns, total):
    """Lowest weighted Gini over candidate columns; None if unsplittable."""
    n = x.shape[0]
    best = None
    for col in columns:
        v = x[:, col]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        if sv[0] == sv[-1]:
            continue
        prefix = np.cumsum(y_onehot[order], axis=0)
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        left = prefix[cut]
        n_left = (cut + 1).astype(np.float64)
        n_right = n - n_left
        gini_left = 1.0 - np.sum(np.square(left / n_left[:, None]), axis=1)
        gini_right = 1.0 - np.sum(
            np.square((total - left) / n_right[:, None]), axis=1
        )
        weighted = (n_left * gini_left + n_right * gini_right) / n
        j = int(np.argmin(weighted))
        if best is None or weighted[j] < best[0]:
            threshold = (sv[cut[j]] + sv[cut[j] + 1]) / 2.0
            best = (float(weighted[j]), int(col), threshold)
    return best


def _grow(x, y, n_classes, rng, max_depth, depth=0) -> TreeNode:
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    pure = counts.max() == counts.sum()
    if len(y) < 2 or pure or (max_depth is not None and depth >= max_depth):
        return Leaf(tuple(counts))
    n_candidates = int(np.ceil(np.sqrt(x.shape[1])))
    columns = rng.choice(x.shape[1], size=n_candidates, replace=False)
    y_onehot = np.zeros((len(y), n_classes))
    y_onehot[np.arange(len(y)), y] = 1.0
    best = _best_split(x, y_onehot, columns, counts)
    if best is None:
        return Leaf(tuple(counts))
    _, col, threshold = best
    mask = x[:, col] <= threshold
    return Split(
        column=col,
        threshold=threshold,
        left=_grow(x[mask], y[mask], n_classes, rng, max_depth, depth + 1),
        right=_grow(x[~mask], y[~mask], n_classes, rng, max_depth, depth + 1),
    )


def forest_fit(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    n_estimators: int,
    seed: int,
    max_depth: int | None = None,
) -> Forest:
    """Bagged CART trees; each tree sees a seeded bootstrap resample."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = len(y)
    trees = []
    for child_seq in np.random.SeedSequence(seed).spawn(n_estimators):
        rng = np.random.default_rng(child_seq)
        bootstrap = rng.integers(0, n, size=n)
        trees.append(_grow(x[bootstrap], y[bootstrap], n_classes, rng, max_depth))
    return Forest(trees=tuple(trees), n_classes=n_classes)


def _accumulate(node: TreeNode, x, rows, out):
    if isinstance(node, Leaf):
        counts = np.array(node.counts)
        out[rows] += counts / counts.sum()
        return
    mask = x[rows, node.column] <= node.threshold
    _accumulate(node.left, x, rows[mask], out)
    _accumulate(node.right, x, rows[~mask], out)


def forest_predict_proba(forest: Forest, x: np.ndarray) -> np.ndarray:
    """Mean of per-tree leaf class distributions, shape (n, n_classes)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros((x.shape[0], forest.n_classes))
    rows = np.arange(x.shape[0])
    for tree in forest.trees:
        _accumulate(tree, x, rows, out)
    return out / len(forest.trees)


def tree_to_jsonable(node: TreeNode):
    if isinstance(node, Leaf):
        return ["leaf", list(node.counts)]
    return [
        "split",
        node.column,
        node.threshold,
        tree_to_jsonable(node.left),
        tree_to_jsonable(node.right),
    ]


def tree_from_jsonable(obj) -> TreeNode:
    if obj[0] == "leaf":
        return Leaf(tuple(float(c) for c in obj[1]))
    return Split(
        column=int(obj[1]),
        threshold=float(obj[2]),
        left=tree_from_jsonable(obj[3]),
        right=tree_from_jsonable(obj[4]),
    )
