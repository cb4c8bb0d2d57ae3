"""Deterministic random-stream derivation.

All randomness in the package flows through numpy Generators derived from
a master seed plus an integer path (user index, repetition index, ...).
Streams derived from distinct paths are independent, so callers can fan
work out across tasks and still get results that do not depend on
execution order.
"""

from __future__ import annotations

import numpy as np


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Return a Generator for the stream identified by (master_seed, *path).

    Path components must be non-negative integers; the same tuple always
    yields the same stream.
    """
    entropy = [int(master_seed), *[int(p) for p in path]]
    if any(e < 0 for e in entropy):
        raise ValueError(f"seed path components must be non-negative, got {entropy}")
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(master_seed: int, *path: int) -> int:
    """Return a plain integer seed drawn from the derived stream."""
    return int(derive_rng(master_seed, *path).integers(0, 2**63 - 1))
