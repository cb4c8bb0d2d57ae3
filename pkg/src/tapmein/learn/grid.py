"""Hyperparameter grids and stratified cross-validated selection.

Candidates are scored by 3-fold stratified CV accuracy on the training
set; the earliest candidate in canonical order wins ties (ascending C
then gamma for the SVM, ascending tree count then depth for the forest).
Fold assignment is derived from the seed and shared across candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from tapmein.learn.forest import forest_score, train_forest
from tapmein.learn.svm import svm_score, train_svm
from tapmein.seeding import derive_rng, derive_seed

DEFAULT_FOLDS = 3


@dataclass(frozen=True)
class SvmParams:
    c: float
    gamma: float
    kernel: str = "rbf"


@dataclass(frozen=True)
class ForestParams:
    tree_count: int = 100
    max_depth: Optional[int] = None
    min_leaf: int = 1
    features_per_split: Optional[int] = None


Params = Union[SvmParams, ForestParams]


@dataclass(frozen=True)
class HyperGrid:
    """Candidate parameter sets per classifier kind, in canonical order."""

    svm: tuple[SvmParams, ...]
    forest: tuple[ForestParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "svm", tuple(self.svm))
        object.__setattr__(self, "forest", tuple(self.forest))

    def candidates(self, kind: str) -> tuple[Params, ...]:
        if kind == "svm":
            return self.svm
        if kind == "forest":
            return self.forest
        raise ValueError(f"unknown classifier kind {kind!r}")


def default_grid(n_features: int) -> HyperGrid:
    """Stock grid bracketing the usual RBF operating range."""
    gammas = sorted({1.0 / n_features, 0.01, 0.1, 1.0})
    cs = (0.1, 1.0, 10.0, 100.0)
    svm = tuple(SvmParams(c=c, gamma=g) for c in cs for g in gammas)
    forest = tuple(
        ForestParams(tree_count=tc, max_depth=d) for tc in (50, 100) for d in (8, None)
    )
    return HyperGrid(svm=svm, forest=forest)


def _train(params: Params, X, y, seed: int):
    if isinstance(params, SvmParams):
        return train_svm(X, y, c=params.c, kernel=params.kernel, gamma=params.gamma)
    return train_forest(
        X,
        y,
        tree_count=params.tree_count,
        max_depth=params.max_depth,
        min_leaf=params.min_leaf,
        features_per_split=params.features_per_split,
        seed=seed,
    )


def _predict(params: Params, model, x) -> int:
    # Boundary accepts: scores at the decision threshold count as genuine.
    if isinstance(params, SvmParams):
        return 1 if svm_score(model, x) >= 0.0 else -1
    return 1 if forest_score(model, x) >= 0.5 else -1


def _stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    fold_of = np.empty(len(y), dtype=int)
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        rng.shuffle(idx)
        fold_of[idx] = np.arange(len(idx)) % folds
    return fold_of


def cross_val_accuracy(
    X, y, params: Params, seed: int = 0, folds: int = DEFAULT_FOLDS
) -> float:
    """Pooled held-out accuracy of one candidate under stratified CV."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    fold_of = _stratified_folds(y, folds, derive_rng(seed, 0))
    correct = 0
    for fold in range(folds):
        test = fold_of == fold
        if not test.any():
            continue
        model = _train(params, X[~test], y[~test], seed=derive_seed(seed, 1 + fold))
        correct += sum(
            1 for xi, yi in zip(X[test], y[test]) if _predict(params, model, xi) == yi
        )
    return correct / len(y)


def grid_search(
    X, y, grid: Union[HyperGrid, Sequence[Params]], kind: str = "svm", seed: int = 0
) -> Params:
    """Pick the candidate with the best CV accuracy; first wins ties."""
    candidates = grid.candidates(kind) if isinstance(grid, HyperGrid) else tuple(grid)
    if not candidates:
        raise ValueError("empty hyperparameter grid")
    best_params = None
    best_acc = -1.0
    for params in candidates:
        acc = cross_val_accuracy(X, y, params, seed=seed)
        if acc > best_acc:
            best_params = params
            best_acc = acc
    return best_params
