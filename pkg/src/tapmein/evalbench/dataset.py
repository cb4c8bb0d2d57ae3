"""Labeled corpora for the evaluation protocol.

A dataset groups, per victim user, genuine samples labeled by condition
and impostor samples labeled by attack kind. "random" impostors tap a
fresh melody of the right length; "attack1/2/3" imitate the victim after
one observation, two observations, or unrestricted video review, in
increasing order of fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from tapmein.errors import TapmeinError
from tapmein.tapcore import RawTapSequence, validate_sequence

ATTACK_KINDS = ("random", "attack1", "attack2", "attack3")
CONDITION_LABELS = ("sitting", "walking")


class DatasetInvariantError(TapmeinError):
    """A dataset sample is invalid or lengths disagree within a user."""


@dataclass(frozen=True)
class UserSamples:
    user_id: str
    genuine: tuple[RawTapSequence, ...]
    attacks: Mapping[str, tuple[RawTapSequence, ...]]

    def __init__(self, user_id, genuine, attacks):
        object.__setattr__(self, "user_id", user_id)
        object.__setattr__(self, "genuine", tuple(genuine))
        object.__setattr__(
            self, "attacks", {kind: tuple(seqs) for kind, seqs in attacks.items()}
        )

    @property
    def length(self) -> int:
        return len(self.genuine[0])

    def genuine_by_condition(self, condition: str) -> tuple[RawTapSequence, ...]:
        return tuple(
            s for s in self.genuine if s.meta is not None and s.meta.condition == condition
        )

    def all_attack_samples(self) -> tuple[RawTapSequence, ...]:
        out: list[RawTapSequence] = []
        for kind in ATTACK_KINDS:
            out.extend(self.attacks.get(kind, ()))
        return tuple(out)


@dataclass(frozen=True)
class LabeledDataset:
    users: tuple[UserSamples, ...]

    def __init__(self, users):
        object.__setattr__(self, "users", tuple(users))

    def user(self, user_id: str) -> UserSamples:
        for u in self.users:
            if u.user_id == user_id:
                return u
        raise KeyError(user_id)

    def validate(self) -> "LabeledDataset":
        """Check every sample and the one-length-per-user invariant."""
        for u in self.users:
            if not u.genuine:
                raise DatasetInvariantError(f"user {u.user_id}: no genuine samples")
            l = u.length
            for group, seqs in [("genuine", u.genuine)] + list(u.attacks.items()):
                for i, seq in enumerate(seqs):
                    try:
                        validate_sequence(seq)
                    except TapmeinError as exc:
                        raise DatasetInvariantError(
                            f"user {u.user_id} {group}[{i}]: {exc}"
                        ) from exc
                    if len(seq) != l:
                        raise DatasetInvariantError(
                            f"user {u.user_id} {group}[{i}]: length {len(seq)} != {l}"
                        )
        return self
