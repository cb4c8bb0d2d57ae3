"""Population channel statistics and synthesized negative samples.

Training a per-user classifier at enrollment time needs impostor samples
that do not exist yet. Instead of shipping raw corpora, the system ships
four tiny channel summaries (min, max, mean, std for pressure, size, down
duration, up duration) pooled over a diverse population, and synthesizes
negatives by drawing each tap value independently from a clamped normal
with those parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from tapmein.errors import TapmeinError
from tapmein.tapcore import MAX_TAPS, MIN_TAPS, ProcessedSequence

CHANNELS = ("pressure", "size", "down", "up")


class EmptyCorpus(TapmeinError):
    """Population statistics requested over zero sequences."""


@dataclass(frozen=True)
class ChannelStats:
    """Summary of one measurement channel, in that channel's units."""

    min: float
    max: float
    mean: float
    std: float

    def __post_init__(self):
        if not (self.min <= self.mean <= self.max):
            raise ValueError(f"mean {self.mean} outside [{self.min}, {self.max}]")
        if self.std < 0:
            raise ValueError(f"negative std {self.std}")


@dataclass(frozen=True)
class PopulationStats:
    """Per-channel summaries plus the number of sequences they pool."""

    pressure: ChannelStats
    size: ChannelStats
    down: ChannelStats
    up: ChannelStats
    sample_count: int
    provenance: Optional[str] = None

    def channel(self, name: str) -> ChannelStats:
        if name not in CHANNELS:
            raise KeyError(name)
        return getattr(self, name)


def _pooled(values: np.ndarray) -> ChannelStats:
    lo, hi = float(values.min()), float(values.max())
    # summation rounding can push the mean a few ulp past the extremes
    return ChannelStats(
        min=lo,
        max=hi,
        mean=float(np.clip(values.mean(), lo, hi)),
        std=float(values.std()),
    )


def fit_population_stats(
    corpus: Sequence[ProcessedSequence], provenance: Optional[str] = None
) -> PopulationStats:
    """Pool every value of each channel across the corpus.

    Std is the population standard deviation. ``sample_count`` is the
    number of sequences pooled.
    """
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cannot fit population statistics on an empty corpus")
    return PopulationStats(
        pressure=_pooled(np.concatenate([s.pressures for s in corpus])),
        size=_pooled(np.concatenate([s.sizes for s in corpus])),
        down=_pooled(np.concatenate([s.down_durations for s in corpus])),
        up=_pooled(np.concatenate([s.up_durations for s in corpus])),
        sample_count=len(corpus),
        provenance=provenance,
    )


def _draw(ch: ChannelStats, n: int, rng: np.random.Generator) -> np.ndarray:
    # Clamped normal: deterministic draw count, and every value stays
    # inside the observed channel range.
    values = rng.normal(ch.mean, ch.std, size=n) if ch.std > 0 else np.full(n, ch.mean)
    return np.clip(values, ch.min, ch.max)


def sample_negative(
    stats: PopulationStats, l: int, rng: np.random.Generator
) -> ProcessedSequence:
    """Draw one synthetic impostor melody of length l.

    Every tap value is an independent clamped-normal draw from its
    channel; the result is fully determined by the generator state.
    """
    if not (MIN_TAPS <= l <= MAX_TAPS):
        raise ValueError(f"length {l} outside [{MIN_TAPS}, {MAX_TAPS}]")
    return ProcessedSequence(
        pressures=_draw(stats.pressure, l, rng),
        sizes=_draw(stats.size, l, rng),
        down_durations=_draw(stats.down, l, rng),
        up_durations=_draw(stats.up, l - 1, rng),
    )


def generate_negatives(
    stats: PopulationStats, l: int, count: int, rng: np.random.Generator
) -> list[ProcessedSequence]:
    """Draw ``count`` independent negatives of length l.

    The recommended count is five times the enrollment size; beyond that
    classifier performance stays flat.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return [sample_negative(stats, l, rng) for _ in range(count)]


def negatives_per_enrollment(n: int, multiplier: int = 5) -> int:
    """Default negative count for an enrollment of n samples."""
    return multiplier * n


def default_population_stats() -> PopulationStats:
    """The population summary bundled with the package.

    Lets the system run before any corpus import; the document's
    provenance field records how it was produced.
    """
    with resources.files("tapmein.data").joinpath("default_population_stats.json").open(
        "r", encoding="utf-8"
    ) as fh:
        doc = json.load(fh)
    channels = {
        name: ChannelStats(
            min=doc[name]["min"], max=doc[name]["max"],
            mean=doc[name]["mean"], std=doc[name]["std"],
        )
        for name in CHANNELS
    }
    return PopulationStats(
        pressure=channels["pressure"],
        size=channels["size"],
        down=channels["down"],
        up=channels["up"],
        sample_count=int(doc["sample_count"]),
        provenance=doc.get("provenance"),
    )
