"""Per-feature standardization.

RBF kernels need comparable feature scales; raw features mix [0, 1]
channels with millisecond durations. Columns are centered by their mean
and divided by their population std, with 1 substituted for zero-std
columns so constants map to exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tapmein.errors import TapmeinError


class EmptyMatrix(TapmeinError):
    """Standardizer fit requested on zero rows."""


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        for name in ("mean", "scale"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(self.scale <= 0):
            raise ValueError("scale entries must be positive")

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.scale

    def inverse(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) * self.scale + self.mean


def fit_standardizer(X) -> Standardizer:
    """Fit column means and population stds over the rows of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyMatrix(f"need a non-empty 2-D matrix, got shape {X.shape}")
    std = X.std(axis=0)
    return Standardizer(mean=X.mean(axis=0), scale=np.where(std > 0, std, 1.0))
