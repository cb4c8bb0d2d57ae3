"""Tap-rhythm two-factor authentication engine.

A user enrolls a short tapped melody; verification combines a hard length
gate with a per-user binary classifier over time- and frequency-domain
features of the tap signal (pressure, touch size, down/up durations).
The package also ships an evaluation bench that replays the enrollment /
attack protocol on synthetic or imported corpora.
"""

from tapmein.tapcore import (
    MAX_TAPS,
    MIN_TAPS,
    ProcessedSequence,
    RawTap,
    RawTapSequence,
    SampleMeta,
    extract_durations,
    materialize,
    validate_sequence,
)
from tapmein.features import FeatureVector, extract_features, feature_names
from tapmein.negatives import PopulationStats, fit_population_stats, generate_negatives
from tapmein.authflow import Decision, ThresholdPolicy, TrainingConfig, UserProfile, enroll, verify

__version__ = "0.1.0"

__all__ = [
    "MAX_TAPS",
    "MIN_TAPS",
    "RawTap",
    "RawTapSequence",
    "SampleMeta",
    "ProcessedSequence",
    "validate_sequence",
    "extract_durations",
    "materialize",
    "FeatureVector",
    "extract_features",
    "feature_names",
    "PopulationStats",
    "fit_population_stats",
    "generate_negatives",
    "TrainingConfig",
    "ThresholdPolicy",
    "UserProfile",
    "Decision",
    "enroll",
    "verify",
    "__version__",
]
