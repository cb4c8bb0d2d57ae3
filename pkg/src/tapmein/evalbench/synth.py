"""Synthetic tap corpus generator.

Stands in for human data collection: each simulated user owns a melody
(per-tap base durations) and a persona (pressure/size means). A genuine
rendition draws a whole-melody tempo factor (people replay the same
melody faster or slower), then jitters every duration multiplicatively,
walking more than sitting. Impostors copy the victim's duration base
with attack-specific fidelity while keeping their own persona for the
touch channels, so attacks get strictly harder to reject from "random"
through "attack3".

The per-rendition tempo drift is what makes enrollment size matter: a
small enrollment set under-samples the user's tempo range, so error
rates fall as n grows. Defaults were tuned only to yield a
non-degenerate, attack-ordered corpus at desk scale; they claim nothing
about real tapping statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from tapmein.evalbench.dataset import ATTACK_KINDS, LabeledDataset, UserSamples
from tapmein.negatives import PopulationStats, fit_population_stats
from tapmein.seeding import derive_rng
from tapmein.tapcore import ProcessedSequence, RawTapSequence, SampleMeta, extract_durations, materialize

_MELODY_LENGTH = (5, 14)
_DOWN_RANGE = (60.0, 400.0)
_UP_RANGE = (60.0, 700.0)
_PERSONA_RANGE = (0.3, 0.8)
_MIN_DURATION = 1.0  # ms; keeps jittered samples valid
_CHANNEL_JITTER = 0.03
_IMITATIONS_PER_ATTACKER = 3


def _default_imitation_jitter() -> dict[str, float]:
    return {"attack1": 0.25, "attack2": 0.18, "attack3": 0.12}


@dataclass(frozen=True)
class SynthParams:
    users: int = 20
    genuine_per_condition: int = 10
    attackers: int = 5
    duration_jitter: float = 0.08
    walking_jitter_scale: float = 1.5
    tempo_drift: float = 0.15  # per-rendition whole-melody speed sigma
    imitation_jitter: Mapping[str, float] = field(default_factory=_default_imitation_jitter)
    seed: int = 0

    def __post_init__(self):
        if self.users < 2:
            raise ValueError("need at least 2 users")
        object.__setattr__(self, "imitation_jitter", dict(self.imitation_jitter))


@dataclass(frozen=True)
class _Persona:
    pressure_mean: float
    size_mean: float


@dataclass(frozen=True)
class _Melody:
    down: np.ndarray
    up: np.ndarray

    @property
    def length(self) -> int:
        return len(self.down)


def _draw_melody(length: int, rng: np.random.Generator) -> _Melody:
    return _Melody(
        down=rng.uniform(*_DOWN_RANGE, size=length),
        up=rng.uniform(*_UP_RANGE, size=length - 1),
    )


def _draw_persona(rng: np.random.Generator) -> _Persona:
    return _Persona(
        pressure_mean=float(rng.uniform(*_PERSONA_RANGE)),
        size_mean=float(rng.uniform(*_PERSONA_RANGE)),
    )


def _jittered_durations(base: np.ndarray, rel_sigma: float, rng) -> np.ndarray:
    values = base * (1.0 + rel_sigma * rng.standard_normal(len(base)))
    return np.maximum(values, _MIN_DURATION)


def _channel_values(mean: float, n: int, rng) -> np.ndarray:
    return np.clip(mean + _CHANNEL_JITTER * rng.standard_normal(n), 0.0, 1.0)


def _render_sample(
    melody: _Melody,
    persona: _Persona,
    rel_sigma: float,
    rng,
    meta: SampleMeta,
    tempo_sigma: float = 0.0,
) -> RawTapSequence:
    l = melody.length
    tempo = max(float(rng.normal(1.0, tempo_sigma)), 0.2) if tempo_sigma > 0 else 1.0
    processed = ProcessedSequence(
        pressures=_channel_values(persona.pressure_mean, l, rng),
        sizes=_channel_values(persona.size_mean, l, rng),
        down_durations=_jittered_durations(melody.down * tempo, rel_sigma, rng),
        up_durations=_jittered_durations(melody.up * tempo, rel_sigma, rng),
    )
    return materialize(processed, meta=meta)


def synth_dataset(params: SynthParams) -> tuple[LabeledDataset, PopulationStats]:
    """Generate a labeled corpus and the population statistics of its
    genuine half. Fully determined by ``params.seed``."""
    attacker_personas = [
        _draw_persona(derive_rng(params.seed, 1, a)) for a in range(params.attackers)
    ]

    users = []
    all_genuine: list[RawTapSequence] = []
    for u in range(params.users):
        user_id = f"user{u:02d}"
        rng = derive_rng(params.seed, 0, u)
        melody = _draw_melody(int(rng.integers(_MELODY_LENGTH[0], _MELODY_LENGTH[1] + 1)), rng)
        persona = _draw_persona(rng)

        genuine = []
        for condition, scale in (("sitting", 1.0), ("walking", params.walking_jitter_scale)):
            sigma = params.duration_jitter * scale
            for _ in range(params.genuine_per_condition):
                genuine.append(
                    _render_sample(
                        melody, persona, sigma, rng,
                        SampleMeta(user_id=user_id, condition=condition, kind="genuine"),
                        tempo_sigma=params.tempo_drift,
                    )
                )
        all_genuine.extend(genuine)

        attacks: dict[str, list[RawTapSequence]] = {}
        for k, kind in enumerate(ATTACK_KINDS):
            samples = []
            for a, persona_a in enumerate(attacker_personas):
                arng = derive_rng(params.seed, 2, u, k, a)
                for _ in range(_IMITATIONS_PER_ATTACKER):
                    if kind == "random":
                        target = _draw_melody(melody.length, arng)
                        sigma = params.duration_jitter
                    else:
                        target = melody
                        sigma = params.imitation_jitter[kind]
                    samples.append(
                        _render_sample(
                            target, persona_a, sigma, arng,
                            SampleMeta(
                                user_id=user_id, condition="sitting",
                                kind=kind, attacker_id=f"attacker{a:02d}",
                            ),
                        )
                    )
            attacks[kind] = samples
        users.append(UserSamples(user_id=user_id, genuine=genuine, attacks=attacks))

    ds = LabeledDataset(users).validate()
    stats = fit_population_stats(
        [extract_durations(s) for s in all_genuine],
        provenance=(
            f"synthetic corpus generator: users={params.users}, "
            f"genuine_per_condition={params.genuine_per_condition}, seed={params.seed}"
        ),
    )
    return ds, stats
