"""Per-user repeated enrollment protocol, enrollment-size sweep and
feature ranking.

For every user and repetition: draw n enrollment samples uniformly
without replacement (from sitting-labeled samples when present), enroll,
then score every remaining genuine sample and every impostor sample.
Rates are averaged over repetitions, then over users. Each (user,
repetition) cell derives its own random stream from (master seed, user
index, repetition index), so results are independent of evaluation order
and reproduce exactly from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from tapmein.authflow import TrainingConfig, enroll, verify
from tapmein.errors import TapmeinError
from tapmein.evalbench.dataset import ATTACK_KINDS, CONDITION_LABELS, LabeledDataset, UserSamples
from tapmein.evalbench.metrics import RateReport, compute_eer, compute_rates
from tapmein.features import feature_names
from tapmein.negatives import PopulationStats
from tapmein.seeding import derive_rng


class InsufficientGenuine(TapmeinError):
    """A user lacks enough genuine samples for the requested protocol."""


@dataclass(frozen=True)
class AttackSummary:
    """Rate report fields averaged over repetitions."""

    eer: float
    fpr: float
    fnr: float
    eer_threshold: float
    genuine_count: int
    impostor_count: int


@dataclass(frozen=True)
class UserResult:
    user_id: str
    attacks: Mapping[str, AttackSummary]
    overall: AttackSummary  # all impostor kinds pooled
    condition_fnr: Mapping[str, float]  # at the profile's operating threshold
    operating_fpr: float


@dataclass(frozen=True)
class ProtocolReport:
    reps: int
    master_seed: int
    config: Mapping[str, object]
    users: tuple[UserResult, ...]
    aggregate_attack_eer: Mapping[str, float]
    aggregate_overall_eer: float
    aggregate_condition_fnr: Mapping[str, float]
    aggregate_operating_fpr: float

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "config": dict(self.config),
            "users": [
                {
                    "user_id": u.user_id,
                    "attacks": {k: vars(s).copy() for k, s in u.attacks.items()},
                    "overall": vars(u.overall).copy(),
                    "condition_fnr": dict(u.condition_fnr),
                    "operating_fpr": u.operating_fpr,
                }
                for u in self.users
            ],
            "aggregate": {
                "attack_eer": dict(self.aggregate_attack_eer),
                "overall_eer": self.aggregate_overall_eer,
                "condition_fnr": dict(self.aggregate_condition_fnr),
                "operating_fpr": self.aggregate_operating_fpr,
            },
        }


@dataclass(frozen=True)
class SweepRow:
    classifier: str
    n: int
    mean_eer: float


def _config_echo(cfg: TrainingConfig, reps: int) -> dict:
    return {
        "n": cfg.n,
        "negative_multiplier": cfg.negative_multiplier,
        "classifier_kind": cfg.classifier_kind,
        "threshold_policy": cfg.threshold_policy.kind,
        "master_seed": cfg.master_seed,
        "reps": reps,
    }


def _enrollment_pool(user: UserSamples) -> list[int]:
    sitting = [
        i for i, s in enumerate(user.genuine)
        if s.meta is not None and s.meta.condition == "sitting"
    ]
    return sitting if sitting else list(range(len(user.genuine)))


def _check_feasible(ds: LabeledDataset, n: int) -> None:
    for user in ds.users:
        if len(user.genuine) <= n:
            raise InsufficientGenuine(
                f"user {user.user_id}: {len(user.genuine)} genuine samples, need > {n}"
            )
        if len(_enrollment_pool(user)) < n:
            raise InsufficientGenuine(
                f"user {user.user_id}: enrollment pool smaller than n={n}"
            )


def _score_all(profile, samples) -> list[float]:
    scores = []
    for s in samples:
        decision = verify(profile, s)
        if decision.score is None:
            raise TapmeinError(
                f"sample rejected before scoring ({decision.reason}); "
                "dataset invariants should prevent this"
            )
        scores.append(decision.score)
    return scores


def _mean_summary(reports: Sequence[RateReport]) -> AttackSummary:
    return AttackSummary(
        eer=float(np.mean([r.eer for r in reports])),
        fpr=float(np.mean([r.fpr for r in reports])),
        fnr=float(np.mean([r.fnr for r in reports])),
        eer_threshold=float(np.mean([r.eer_threshold for r in reports])),
        genuine_count=reports[0].genuine_count,
        impostor_count=reports[0].impostor_count,
    )


def _evaluate_user(
    user: UserSamples,
    user_index: int,
    ds_attacks: Sequence[str],
    stats: PopulationStats,
    cfg: TrainingConfig,
    reps: int,
    collect_importances: Optional[dict] = None,
) -> UserResult:
    pool = _enrollment_pool(user)
    per_attack: dict[str, list[RateReport]] = {k: [] for k in ds_attacks}
    overall: list[RateReport] = []
    condition_fnr: dict[str, list[float]] = {}
    operating_fpr: list[float] = []

    for rep in range(reps):
        rng = derive_rng(cfg.master_seed, user_index, rep)
        # Uniform draw without replacement via permutation prefix: sweeps
        # over n then share draws (common random numbers), so curves
        # across enrollment sizes are paired.
        chosen = rng.permutation(len(pool))[: cfg.n]
        enrolled_idx = {pool[int(i)] for i in chosen}
        enrolled = [user.genuine[i] for i in sorted(enrolled_idx)]
        held_out = [s for i, s in enumerate(user.genuine) if i not in enrolled_idx]

        rep_cfg = replace(cfg, master_seed=int(rng.integers(0, 2**63 - 1)))
        profile = enroll(user.user_id, enrolled, stats, rep_cfg)
        if collect_importances is not None:
            names = feature_names(profile.length)
            for name, imp in zip(names, profile.model.importances):
                collect_importances.setdefault(name, []).append(float(imp))

        genuine_scores = _score_all(profile, held_out)
        attack_scores = {
            kind: _score_all(profile, user.attacks[kind]) for kind in ds_attacks
        }
        pooled = [s for kind in ds_attacks for s in attack_scores[kind]]

        for kind in ds_attacks:
            per_attack[kind].append(compute_eer(genuine_scores, attack_scores[kind]))
        overall.append(compute_eer(genuine_scores, pooled))
        operating_fpr.append(compute_rates([], pooled, profile.threshold)[0])

        for condition in CONDITION_LABELS:
            cond_scores = [
                sc for s, sc in zip(held_out, genuine_scores)
                if s.meta is not None and s.meta.condition == condition
            ]
            if cond_scores:
                fnr = compute_rates(cond_scores, [], profile.threshold)[1]
                condition_fnr.setdefault(condition, []).append(fnr)

    return UserResult(
        user_id=user.user_id,
        attacks={k: _mean_summary(v) for k, v in per_attack.items()},
        overall=_mean_summary(overall),
        condition_fnr={k: float(np.mean(v)) for k, v in condition_fnr.items()},
        operating_fpr=float(np.mean(operating_fpr)),
    )


def run_protocol(
    ds: LabeledDataset,
    stats: PopulationStats,
    cfg: TrainingConfig,
    reps: int = 30,
) -> ProtocolReport:
    """Run the repeated enrollment/attack evaluation over a dataset."""
    _check_feasible(ds, cfg.n)
    attacks = [k for k in ATTACK_KINDS if any(u.attacks.get(k) for u in ds.users)]
    if not attacks:
        raise InsufficientGenuine("dataset has no impostor samples to score")

    users = [
        _evaluate_user(user, ui, attacks, stats, cfg, reps)
        for ui, user in enumerate(ds.users)
    ]

    conditions = sorted({c for u in users for c in u.condition_fnr})
    return ProtocolReport(
        reps=reps,
        master_seed=cfg.master_seed,
        config=_config_echo(cfg, reps),
        users=tuple(users),
        aggregate_attack_eer={
            k: float(np.mean([u.attacks[k].eer for u in users])) for k in attacks
        },
        aggregate_overall_eer=float(np.mean([u.overall.eer for u in users])),
        aggregate_condition_fnr={
            c: float(np.mean([u.condition_fnr[c] for u in users if c in u.condition_fnr]))
            for c in conditions
        },
        aggregate_operating_fpr=float(np.mean([u.operating_fpr for u in users])),
    )


def sweep_enrollment_size(
    ds: LabeledDataset,
    stats: PopulationStats,
    cfg: TrainingConfig,
    n_values: Sequence[int] = (2, 3, 4, 5, 6, 7),
    classifier_kinds: Sequence[str] = ("svm", "forest"),
    reps: int = 30,
) -> list[SweepRow]:
    """Mean pooled-impostor EER per (classifier, enrollment size)."""
    rows = []
    for kind in classifier_kinds:
        for n in n_values:
            report = run_protocol(ds, stats, replace(cfg, classifier_kind=kind, n=n), reps)
            rows.append(SweepRow(classifier=kind, n=n, mean_eer=report.aggregate_overall_eer))
    return rows


def rank_features(
    ds: LabeledDataset,
    stats: PopulationStats,
    cfg: TrainingConfig,
    reps: int = 30,
    top_k: int = 20,
) -> list[tuple[str, float]]:
    """Top features by mean forest importance over users and repetitions.

    Importance vectors differ in length across users (raw features depend
    on the melody length), so aggregation is by feature name over the
    runs in which the feature exists.
    """
    if cfg.classifier_kind != "forest":
        raise ValueError("feature ranking requires a forest classifier config")
    _check_feasible(ds, cfg.n)
    attacks = [k for k in ATTACK_KINDS if any(u.attacks.get(k) for u in ds.users)]

    importances: dict[str, list[float]] = {}
    for ui, user in enumerate(ds.users):
        _evaluate_user(user, ui, attacks, stats, cfg, reps, collect_importances=importances)

    ranked = sorted(
        ((name, float(np.mean(values))) for name, values in importances.items()),
        key=lambda item: (-item[1], item[0]),
    )
    return ranked[:top_k]
