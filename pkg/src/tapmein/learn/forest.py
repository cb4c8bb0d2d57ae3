"""Random forest of Gini-impurity decision stumps-to-trees.

Each tree is grown on a bootstrap resample; at every node a random
subset of ceil(sqrt(m)) features is scanned for the threshold that
minimizes weighted Gini impurity. Trees vote genuine/impostor and the
forest score is the genuine vote fraction. Split-impurity decreases are
accumulated per feature and normalized into the importance vector used
by the feature-ranking bench.

Trees are stored as flat node arrays (feature, threshold, left, right,
class counts) so models serialize losslessly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from tapmein.learn.svm import DimensionMismatch, SingleClassTraining
from tapmein.seeding import derive_rng

_LEAF = -1


@dataclass(frozen=True)
class TreeArrays:
    """One decision tree as parallel node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # per node: [impostor rows, genuine rows]

    def __post_init__(self):
        casts = {
            "feature": np.intp, "left": np.intp, "right": np.intp,
            "threshold": float, "counts": np.int64,
        }
        for name, dtype in casts.items():
            arr = np.asarray(getattr(self, name), dtype=dtype)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def vote(self, x: np.ndarray) -> int:
        """Route x to a leaf; +1 when genuine rows outnumber impostor rows."""
        node = 0
        while self.feature[node] != _LEAF:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        neg, pos = self.counts[node]
        return 1 if pos > neg else -1


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeArrays, ...]
    importances: np.ndarray
    n_features: int
    tree_count: int
    max_depth: Optional[int]
    min_leaf: int
    features_per_split: int
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.importances, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "importances", arr)
        object.__setattr__(self, "trees", tuple(self.trees))


def _gini(pos: float, total: float) -> float:
    if total == 0:
        return 0.0
    p = pos / total
    return 2.0 * p * (1.0 - p)


def _best_split(values: np.ndarray, labels01: np.ndarray, min_leaf: int):
    """Best (impurity, threshold) on one feature, or None if unsplittable."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    cls = labels01[order]
    n = len(v)
    pos_cum = np.cumsum(cls)
    total_pos = pos_cum[-1]

    cut = np.arange(1, n)  # left side gets v[:cut]
    usable = v[1:] > v[:-1]
    if min_leaf > 1:
        usable &= (cut >= min_leaf) & (n - cut >= min_leaf)
    if not usable.any():
        return None

    nl = cut[usable].astype(float)
    nr = n - nl
    pl = pos_cum[:-1][usable].astype(float)
    pr = total_pos - pl
    gini_l = 1.0 - (pl / nl) ** 2 - ((nl - pl) / nl) ** 2
    gini_r = 1.0 - (pr / nr) ** 2 - ((nr - pr) / nr) ** 2
    weighted = (nl * gini_l + nr * gini_r) / n

    k = int(np.argmin(weighted))
    idx = cut[usable][k] - 1
    threshold = 0.5 * (v[idx] + v[idx + 1])
    return float(weighted[k]), threshold


def _grow_tree(X, y01, rng, max_depth, min_leaf, mtry, importances):
    n_total = len(y01)
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[tuple[int, int]] = []

    def add_node(idx_rows) -> int:
        node = len(feature)
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        pos = int(y01[idx_rows].sum())
        counts.append((len(idx_rows) - pos, pos))
        return node

    def build(idx_rows: np.ndarray, depth: int) -> int:
        node = add_node(idx_rows)
        neg, pos = counts[node]
        n = neg + pos
        if pos == 0 or neg == 0 or n < 2 * min_leaf:
            return node
        if max_depth is not None and depth >= max_depth:
            return node

        candidates = rng.choice(X.shape[1], size=mtry, replace=False)
        best = None
        for f in candidates:
            split = _best_split(X[idx_rows, f], y01[idx_rows], min_leaf)
            if split is not None and (best is None or split[0] < best[0]):
                best = (split[0], int(f), split[1])
        if best is None:
            return node

        impurity_after, f, thr = best
        node_gini = _gini(pos, n)
        importances[f] += (n / n_total) * (node_gini - impurity_after)

        mask = X[idx_rows, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = build(idx_rows[mask], depth + 1)
        right[node] = build(idx_rows[~mask], depth + 1)
        return node

    build(np.arange(n_total), 0)
    return TreeArrays(
        feature=feature, threshold=threshold, left=left, right=right, counts=counts
    )


def train_forest(
    X,
    y,
    tree_count: int = 100,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
    features_per_split: Optional[int] = None,
    seed: int = 0,
) -> ForestModel:
    """Grow ``tree_count`` bootstrap trees; fully determined by ``seed``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.all(y == y[0]):
        raise SingleClassTraining("training data contains a single class")
    y01 = (y > 0).astype(np.int64)
    n, m = X.shape
    mtry = features_per_split or math.isqrt(m - 1) + 1  # ceil(sqrt(m))

    rng = derive_rng(seed)
    importances = np.zeros(m)
    trees = []
    for _ in range(tree_count):
        rows = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[rows], y01[rows], rng, max_depth, min_leaf, mtry, importances))

    total = importances.sum()
    if total > 0:
        importances /= total
    return ForestModel(
        trees=tuple(trees),
        importances=importances,
        n_features=m,
        tree_count=tree_count,
        max_depth=max_depth,
        min_leaf=min_leaf,
        features_per_split=mtry,
        seed=seed,
    )


def forest_score(model: ForestModel, x) -> float:
    """Fraction of trees voting genuine, in [0, 1]."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise DimensionMismatch(
            f"expected {model.n_features} features, got shape {x.shape}"
        )
    votes = sum(1 for tree in model.trees if tree.vote(x) > 0)
    return votes / len(model.trees)
