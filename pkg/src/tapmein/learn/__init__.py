"""Per-user binary classifiers and their training machinery."""

from tapmein.learn.scaling import EmptyMatrix, Standardizer, fit_standardizer
from tapmein.learn.svm import (
    NoConvergenceWarning,
    SingleClassTraining,
    DimensionMismatch,
    SvmModel,
    svm_score,
    train_svm,
)
from tapmein.learn.forest import ForestModel, forest_score, train_forest
from tapmein.learn.grid import (
    ForestParams,
    HyperGrid,
    SvmParams,
    cross_val_accuracy,
    default_grid,
    grid_search,
)

__all__ = [
    "Standardizer",
    "fit_standardizer",
    "EmptyMatrix",
    "SvmModel",
    "train_svm",
    "svm_score",
    "SingleClassTraining",
    "DimensionMismatch",
    "NoConvergenceWarning",
    "ForestModel",
    "train_forest",
    "forest_score",
    "HyperGrid",
    "SvmParams",
    "ForestParams",
    "default_grid",
    "grid_search",
    "cross_val_accuracy",
]
