"""Domain types for raw tap input and its reduction to four timeseries.

A tap is a touch-down / touch-up pair carrying pressure and contact size.
A tapped melody of length ``l`` reduces to four timeseries: per-tap
pressure, per-tap size, per-tap down duration (finger on screen) and the
``l - 1`` up durations between consecutive taps. Everything downstream
(features, classifiers, the evaluation bench) consumes this processed
form; timestamps never leave this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from tapmein.errors import TapmeinError

# Bounds on accepted melody lengths. Four taps is the shortest sequence
# with a non-degenerate up-duration series; the cap bounds DFT cost.
MIN_TAPS = 4
MAX_TAPS = 64

CONDITIONS = ("sitting", "walking", "unlabeled")
SAMPLE_KINDS = ("genuine", "random", "attack1", "attack2", "attack3")


class NonMonotonicTimestamps(TapmeinError):
    """A tap ends before it starts, or overlaps the next tap."""


class OutOfRangeChannel(TapmeinError):
    """Pressure or size outside [0, 1]."""


class BadLength(TapmeinError):
    """Tap count outside [MIN_TAPS, MAX_TAPS]."""


@dataclass(frozen=True)
class RawTap:
    """One tap: down/up timestamps in milliseconds plus pressure and size.

    Timestamps come from any monotonic clock; only differences matter.
    Invariants are enforced by ``validate_sequence``, not the constructor,
    so malformed device input can be represented and then rejected.
    """

    down_ts: float
    up_ts: float
    pressure: float
    size: float


@dataclass(frozen=True)
class SampleMeta:
    """Optional labels attached to a captured sequence."""

    user_id: Optional[str] = None
    condition: str = "unlabeled"
    kind: str = "genuine"
    attacker_id: Optional[str] = None


@dataclass(frozen=True)
class RawTapSequence:
    """An ordered tap melody, optionally labeled."""

    taps: tuple[RawTap, ...]
    meta: Optional[SampleMeta] = None

    def __init__(self, taps: Iterable[RawTap], meta: Optional[SampleMeta] = None):
        object.__setattr__(self, "taps", tuple(taps))
        object.__setattr__(self, "meta", meta)

    def __len__(self) -> int:
        return len(self.taps)


def _readonly(values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ProcessedSequence:
    """The four timeseries of a validated melody of length ``l``.

    ``pressures``, ``sizes`` and ``down_durations`` have ``l`` entries;
    ``up_durations`` has ``l - 1`` (the last tap has no following gap).
    Arrays are read-only; instances are safe to share across tasks.
    """

    pressures: np.ndarray
    sizes: np.ndarray
    down_durations: np.ndarray
    up_durations: np.ndarray

    def __init__(self, pressures, sizes, down_durations, up_durations):
        object.__setattr__(self, "pressures", _readonly(pressures))
        object.__setattr__(self, "sizes", _readonly(sizes))
        object.__setattr__(self, "down_durations", _readonly(down_durations))
        object.__setattr__(self, "up_durations", _readonly(up_durations))
        l = len(self.pressures)
        if not (len(self.sizes) == l and len(self.down_durations) == l):
            raise ValueError("pressures, sizes and down_durations must have equal length")
        if len(self.up_durations) != l - 1:
            raise ValueError(f"expected {l - 1} up durations, got {len(self.up_durations)}")

    @property
    def length(self) -> int:
        return len(self.pressures)


def validate_sequence(seq: RawTapSequence) -> RawTapSequence:
    """Check every sequence invariant and return the sequence unchanged.

    Raises:
        BadLength: tap count outside [MIN_TAPS, MAX_TAPS].
        NonMonotonicTimestamps: a tap with up before down, or a tap
            starting before the previous one ended.
        OutOfRangeChannel: pressure or size outside [0, 1].
    """
    n = len(seq.taps)
    if n < MIN_TAPS or n > MAX_TAPS:
        raise BadLength(f"tap count {n} outside [{MIN_TAPS}, {MAX_TAPS}]")
    for i, tap in enumerate(seq.taps):
        if not (np.isfinite(tap.down_ts) and np.isfinite(tap.up_ts)):
            raise NonMonotonicTimestamps(f"tap {i}: non-finite timestamp")
        if tap.up_ts < tap.down_ts:
            raise NonMonotonicTimestamps(
                f"tap {i}: up at {tap.up_ts} before down at {tap.down_ts}"
            )
        if i + 1 < n and seq.taps[i + 1].down_ts < tap.up_ts:
            raise NonMonotonicTimestamps(
                f"tap {i + 1}: down at {seq.taps[i + 1].down_ts} overlaps "
                f"previous up at {tap.up_ts}"
            )
        for channel, value in (("pressure", tap.pressure), ("size", tap.size)):
            if not (np.isfinite(value) and 0.0 <= value <= 1.0):
                raise OutOfRangeChannel(f"tap {i}: {channel} {value} outside [0, 1]")
    return seq


def extract_durations(seq: RawTapSequence) -> ProcessedSequence:
    """Reduce a validated sequence to its four timeseries.

    Down duration of tap i is ``up_ts_i - down_ts_i``; the up duration
    between taps i and i+1 is ``down_ts_{i+1} - up_ts_i``. Pressures and
    sizes are copied in order. The result is translation-invariant in the
    timestamps.
    """
    taps = seq.taps
    return ProcessedSequence(
        pressures=[t.pressure for t in taps],
        sizes=[t.size for t in taps],
        down_durations=[t.up_ts - t.down_ts for t in taps],
        up_durations=[taps[i + 1].down_ts - taps[i].up_ts for i in range(len(taps) - 1)],
    )


def materialize(
    seq: ProcessedSequence,
    start_ts: float = 0.0,
    meta: Optional[SampleMeta] = None,
) -> RawTapSequence:
    """Re-materialize a processed sequence to timestamps starting at ``start_ts``.

    Inverse of ``extract_durations`` up to the (irrelevant) absolute time
    origin: extracting durations from the result reproduces ``seq``.
    """
    taps = []
    t = float(start_ts)
    l = seq.length
    for i in range(l):
        down = t
        up = down + float(seq.down_durations[i])
        taps.append(RawTap(down, up, float(seq.pressures[i]), float(seq.sizes[i])))
        t = up + (float(seq.up_durations[i]) if i < l - 1 else 0.0)
    return RawTapSequence(taps, meta=meta)
