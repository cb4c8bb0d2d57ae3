"""False positive / false negative rates and equal error rate.

Convention fixed package-wide: a score at or above the threshold accepts.
FPR is the accepted fraction of impostor scores, FNR the rejected
fraction of genuine scores. The EER is located by sweeping candidate
thresholds (midpoints between adjacent distinct pooled scores plus a
sentinel on each side) and linearly interpolating both rate curves to the
point where they cross.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tapmein.errors import TapmeinError


class EmptyScoreSet(TapmeinError):
    """EER requested with no genuine or no impostor scores."""


@dataclass(frozen=True)
class RateReport:
    """Error rates at the equal-error operating point."""

    fpr: float
    fnr: float
    eer: float
    eer_threshold: float
    genuine_count: int
    impostor_count: int


def compute_rates(genuine_scores, impostor_scores, threshold: float) -> tuple[float, float]:
    """(fpr, fnr) at one threshold; an empty side contributes rate 0."""
    genuine = np.asarray(genuine_scores, dtype=float)
    impostor = np.asarray(impostor_scores, dtype=float)
    fpr = float(np.mean(impostor >= threshold)) if impostor.size else 0.0
    fnr = float(np.mean(genuine < threshold)) if genuine.size else 0.0
    return fpr, fnr


def _candidate_thresholds(pooled: np.ndarray) -> np.ndarray:
    distinct = np.unique(pooled)
    midpoints = 0.5 * (distinct[:-1] + distinct[1:])
    return np.concatenate([[distinct[0] - 1.0], midpoints, [distinct[-1] + 1.0]])


def compute_eer(genuine_scores, impostor_scores) -> RateReport:
    """Equal error rate of two non-empty score sets.

    fpr - fnr is non-increasing in the threshold, from +1 below every
    score to -1 above; the crossing is interpolated linearly between the
    bracketing candidates. The reported fpr/fnr are the achievable rates
    at the interpolated threshold.
    """
    genuine = np.asarray(genuine_scores, dtype=float)
    impostor = np.asarray(impostor_scores, dtype=float)
    if genuine.size == 0 or impostor.size == 0:
        raise EmptyScoreSet("need at least one genuine and one impostor score")

    thresholds = _candidate_thresholds(np.concatenate([genuine, impostor]))
    fpr = np.array([np.mean(impostor >= t) for t in thresholds])
    fnr = np.array([np.mean(genuine < t) for t in thresholds])
    diff = fpr - fnr

    k = int(np.argmax(diff <= 0.0))  # first candidate at or past the crossing
    if diff[k] == 0.0:
        eer = float(fpr[k])
        eer_threshold = float(thresholds[k])
    else:
        lam = diff[k - 1] / (diff[k - 1] - diff[k])
        eer = float(fpr[k - 1] + lam * (fpr[k] - fpr[k - 1]))
        eer_threshold = float(thresholds[k - 1] + lam * (thresholds[k] - thresholds[k - 1]))

    at_fpr, at_fnr = compute_rates(genuine, impostor, eer_threshold)
    return RateReport(
        fpr=at_fpr,
        fnr=at_fnr,
        eer=eer,
        eer_threshold=eer_threshold,
        genuine_count=int(genuine.size),
        impostor_count=int(impostor.size),
    )
