"""Enrollment and verification orchestration.

Enrollment turns n same-length genuine samples into a user profile:
featurize the positives, synthesize 5n negatives from population
statistics, standardize, grid-search the classifier, train on everything
and fix a decision threshold. Verification runs the hard length gate
first (wrong tap count is rejected before any feature work), then scores
the candidate against the stored classifier.

The whole flow is a pure function of its inputs plus the master seed in
the training config, so profiles and decisions reproduce exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from tapmein.errors import TapmeinError
from tapmein.features import LAYOUT_VERSION, extract_features, feature_count
from tapmein.learn import (
    ForestModel,
    HyperGrid,
    Standardizer,
    SvmModel,
    default_grid,
    fit_standardizer,
    forest_score,
    grid_search,
    svm_score,
    train_forest,
    train_svm,
)
from tapmein.negatives import PopulationStats, generate_negatives
from tapmein.seeding import derive_rng, derive_seed
from tapmein.tapcore import (
    MAX_TAPS,
    MIN_TAPS,
    ProcessedSequence,
    RawTapSequence,
    extract_durations,
    validate_sequence,
)


class InsufficientEnrollment(TapmeinError):
    """Fewer enrollment samples than the configured n."""


class InconsistentLength(TapmeinError):
    """Enrollment samples disagree on tap count."""


@dataclass(frozen=True)
class ThresholdPolicy:
    """How the accept threshold is fixed after training.

    "zero" uses the classifier's native boundary (decision value 0 for the
    SVM, vote fraction 0.5 for the forest). "calibrated" scores freshly
    drawn negatives and picks the smallest threshold whose sampled false
    positive rate is at most ``target_fpr``.
    """

    kind: str = "zero"
    target_fpr: float = 0.01
    sample_count: int = 200

    def __post_init__(self):
        if self.kind not in ("zero", "calibrated"):
            raise ValueError(f"unknown threshold policy {self.kind!r}")
        if not (0.0 < self.target_fpr < 1.0):
            raise ValueError("target_fpr must be in (0, 1)")


@dataclass(frozen=True)
class TrainingConfig:
    n: int = 5
    negative_multiplier: int = 5
    classifier_kind: str = "svm"
    grid: Optional[HyperGrid] = None
    threshold_policy: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    master_seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("enrollment size n must be >= 2")
        if self.negative_multiplier < 1:
            raise ValueError("negative_multiplier must be >= 1")
        if self.classifier_kind not in ("svm", "forest"):
            raise ValueError(f"unknown classifier kind {self.classifier_kind!r}")


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    length: int
    standardizer: Standardizer
    classifier_kind: str
    model: Union[SvmModel, ForestModel]
    threshold: float
    population_stats: PopulationStats
    created_at: Optional[float] = None
    layout_version: int = LAYOUT_VERSION

    def __post_init__(self):
        if not (MIN_TAPS <= self.length <= MAX_TAPS):
            raise ValueError(f"enrolled length {self.length} out of range")
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")


@dataclass(frozen=True)
class Decision:
    """Outcome of one verification attempt.

    ``score`` is present exactly when the candidate reached the
    classifier (reason "ok"); gate rejections carry no score.
    """

    accepted: bool
    score: Optional[float]
    threshold: float
    reason: str  # ok | length_mismatch | invalid_input


def _score_model(profile: UserProfile, standardized: np.ndarray) -> float:
    if profile.classifier_kind == "svm":
        return svm_score(profile.model, standardized)
    return forest_score(profile.model, standardized)


def _score_processed(profile: UserProfile, processed: ProcessedSequence) -> float:
    features = extract_features(processed).values
    return _score_model(profile, profile.standardizer.apply(features))


def enroll(
    user_id: str,
    samples: Sequence[RawTapSequence],
    stats: PopulationStats,
    cfg: TrainingConfig,
    created_at: Optional[float] = None,
) -> UserProfile:
    """Train a profile from genuine samples. All provided samples are used
    as positives; there must be at least cfg.n of them, all one length.

    ``created_at`` is stamped by the caller (the store does this on save)
    so that identical inputs and seed yield byte-identical profiles.
    """
    samples = list(samples)
    if len(samples) < cfg.n:
        raise InsufficientEnrollment(
            f"need at least {cfg.n} samples, got {len(samples)}"
        )
    for s in samples:
        validate_sequence(s)
    lengths = {len(s) for s in samples}
    if len(lengths) != 1:
        raise InconsistentLength(f"samples disagree on tap count: {sorted(lengths)}")
    l = lengths.pop()

    positives = [extract_durations(s) for s in samples]
    n_pos = len(positives)
    negatives = generate_negatives(
        stats, l, cfg.negative_multiplier * n_pos, derive_rng(cfg.master_seed, 1)
    )

    X = np.array([extract_features(p).values for p in positives + negatives])
    y = np.concatenate([np.ones(n_pos), -np.ones(len(negatives))])
    standardizer = fit_standardizer(X)
    Xs = np.array([standardizer.apply(row) for row in X])

    grid = cfg.grid if cfg.grid is not None else default_grid(feature_count(l))
    params = grid_search(
        Xs, y, grid, kind=cfg.classifier_kind, seed=derive_seed(cfg.master_seed, 2)
    )
    if cfg.classifier_kind == "svm":
        model = train_svm(Xs, y, c=params.c, kernel=params.kernel, gamma=params.gamma)
    else:
        model = train_forest(
            Xs,
            y,
            tree_count=params.tree_count,
            max_depth=params.max_depth,
            min_leaf=params.min_leaf,
            features_per_split=params.features_per_split,
            seed=derive_seed(cfg.master_seed, 3),
        )

    profile = UserProfile(
        user_id=user_id,
        length=l,
        standardizer=standardizer,
        classifier_kind=cfg.classifier_kind,
        model=model,
        threshold=0.0 if cfg.classifier_kind == "svm" else 0.5,
        population_stats=stats,
        created_at=created_at,
    )
    policy = cfg.threshold_policy
    if policy.kind == "calibrated":
        threshold = calibrate_threshold(
            profile,
            policy.sample_count,
            policy.target_fpr,
            derive_rng(cfg.master_seed, 4),
        )
        profile = replace(profile, threshold=threshold)
    return profile


def calibrate_threshold(
    profile: UserProfile,
    count: int,
    target_fpr: float,
    rng: np.random.Generator,
) -> float:
    """Smallest threshold whose sampled false positive rate is <= target.

    Scores ``count`` freshly drawn negatives (never the training ones) and
    returns the value just above the highest score that must be rejected.
    """
    if not (0.0 < target_fpr < 1.0):
        raise ValueError("target_fpr must be in (0, 1)")
    negatives = generate_negatives(profile.population_stats, profile.length, count, rng)
    scores = np.sort([_score_processed(profile, s) for s in negatives])[::-1]
    allowed = int(math.floor(target_fpr * count))  # negatives we may still accept
    return float(np.nextafter(scores[allowed], np.inf))


def verify(profile: UserProfile, candidate: RawTapSequence) -> Decision:
    """Gate then score one candidate; never raises on bad input."""
    try:
        validate_sequence(candidate)
    except TapmeinError:
        return Decision(False, None, profile.threshold, "invalid_input")
    if len(candidate) != profile.length:
        return Decision(False, None, profile.threshold, "length_mismatch")
    score = _score_processed(profile, extract_durations(candidate))
    return Decision(score >= profile.threshold, score, profile.threshold, "ok")
