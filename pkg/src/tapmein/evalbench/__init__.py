"""Evaluation bench: error-rate metrics, synthetic corpora and the
per-user enrollment/attack protocol."""

from tapmein.evalbench.metrics import EmptyScoreSet, RateReport, compute_eer, compute_rates
from tapmein.evalbench.dataset import LabeledDataset, UserSamples, ATTACK_KINDS
from tapmein.evalbench.synth import SynthParams, synth_dataset
from tapmein.evalbench.protocol import (
    AttackSummary,
    InsufficientGenuine,
    ProtocolReport,
    SweepRow,
    UserResult,
    rank_features,
    run_protocol,
    sweep_enrollment_size,
)

__all__ = [
    "compute_rates",
    "compute_eer",
    "RateReport",
    "EmptyScoreSet",
    "LabeledDataset",
    "UserSamples",
    "ATTACK_KINDS",
    "SynthParams",
    "synth_dataset",
    "run_protocol",
    "sweep_enrollment_size",
    "rank_features",
    "ProtocolReport",
    "UserResult",
    "AttackSummary",
    "SweepRow",
    "InsufficientGenuine",
]
