"""Fixed-layout feature vector over the four tap timeseries.

For a melody of length ``l`` the vector holds, in order:

  1. raw pressures, sizes, down durations (``l`` each) and up durations
     (``l - 1``),
  2. time-domain min/max/mean/variance per series (16 values),
  3. the same four statistics over DFT magnitudes per series (16 values),
  4. per-series energy, the sum of all DFT magnitudes (4 values).

Total length ``4l + 35``. Series order is always pressure, size, down, up
("p", "s", "d", "u"). Durations stay in milliseconds here; scaling is the
learner's job.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tapmein.errors import TapmeinError
from tapmein.tapcore import ProcessedSequence

LAYOUT_VERSION = 1

_SERIES_CODES = ("p", "s", "d", "u")
_STAT_NAMES = ("min", "max", "mean", "var")


class EmptySeries(TapmeinError):
    """Statistics or spectrum requested for an empty series."""


@dataclass(frozen=True)
class SeriesStats:
    min: float
    max: float
    mean: float
    variance: float


@dataclass(frozen=True)
class FeatureVector:
    """Feature values plus the layout revision they were computed under."""

    values: np.ndarray
    layout_version: int = LAYOUT_VERSION

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)


def series_stats(x) -> SeriesStats:
    """Population min/max/mean/variance of a non-empty series."""
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise EmptySeries("cannot compute statistics of an empty series")
    lo, hi = float(arr.min()), float(arr.max())
    # summation rounding can push the mean a few ulp past the extremes
    return SeriesStats(
        min=lo,
        max=hi,
        mean=float(np.clip(arr.mean(), lo, hi)),
        variance=float(arr.var()),
    )


def dft_magnitudes(x) -> np.ndarray:
    """Magnitudes of all n DFT bins of x, DC included.

    m_k = |sum_j x_j * exp(-2*pi*i*k*j/n)| for k = 0..n-1. The series is
    transformed at its own length; no zero padding.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        raise EmptySeries("cannot transform an empty series")
    return np.abs(np.fft.fft(arr))


def _stat_block(x: np.ndarray) -> list[float]:
    s = series_stats(x)
    return [s.min, s.max, s.mean, s.variance]


def extract_features(seq: ProcessedSequence) -> FeatureVector:
    """Build the fixed-layout feature vector of a processed sequence."""
    series = (seq.pressures, seq.sizes, seq.down_durations, seq.up_durations)
    spectra = [dft_magnitudes(x) for x in series]

    values: list[float] = []
    for x in series:
        values.extend(x.tolist())
    for x in series:
        values.extend(_stat_block(x))
    for mags in spectra:
        values.extend(_stat_block(mags))
    for mags in spectra:
        values.append(float(np.sum(mags)))
    return FeatureVector(values=np.array(values, dtype=float))


def feature_count(l: int) -> int:
    """Vector length for an l-tap melody."""
    return 4 * l + 35


def feature_names(l: int) -> list[str]:
    """Positional names for every feature of an l-tap melody.

    Raw values are 1-indexed per series ("p1", "u3", ...); statistics are
    named "<series>_<stat>", spectral statistics "<series>_fft_<stat>",
    energies "<series>_energy".
    """
    names: list[str] = []
    lengths = {"p": l, "s": l, "d": l, "u": l - 1}
    for code in _SERIES_CODES:
        names.extend(f"{code}{i + 1}" for i in range(lengths[code]))
    for code in _SERIES_CODES:
        names.extend(f"{code}_{stat}" for stat in _STAT_NAMES)
    for code in _SERIES_CODES:
        names.extend(f"{code}_fft_{stat}" for stat in _STAT_NAMES)
    names.extend(f"{code}_energy" for code in _SERIES_CODES)
    return names
