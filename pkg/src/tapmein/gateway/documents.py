"""Versioned JSON documents: labeled datasets, population statistics and
tap sample files.

All documents are UTF-8 JSON with an explicit schema_version, decimal
numbers at full double precision, and strict validation: unknown keys,
missing fields, bad enums and invalid tap sequences all raise
SchemaViolation carrying the offending element's path.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from tapmein.errors import TapmeinError
from tapmein.evalbench.dataset import ATTACK_KINDS, LabeledDataset, UserSamples
from tapmein.negatives import CHANNELS, ChannelStats, PopulationStats
from tapmein.tapcore import RawTap, RawTapSequence, SampleMeta

SCHEMA_VERSION = 1
USER_ID_RE = re.compile(r"^[a-z0-9_-]{1,64}$")

_CONDITIONS = ("sitting", "walking")
_KINDS = ("genuine",) + ATTACK_KINDS
_TAP_FIELDS = ("down_ts", "up_ts", "pressure", "size")


class SchemaViolation(TapmeinError):
    """Document does not match its schema; ``locus`` names the element."""

    def __init__(self, message: str, locus: str = ""):
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)


def _require(obj: Mapping, key: str, locus: str) -> Any:
    if not isinstance(obj, Mapping):
        raise SchemaViolation(f"expected an object, got {type(obj).__name__}", locus)
    if key not in obj:
        raise SchemaViolation(f"missing required field '{key}'", f"{locus}.{key}" if locus else key)
    return obj[key]


def _no_extras(obj: Mapping, allowed: tuple, locus: str) -> None:
    extras = sorted(set(obj) - set(allowed))
    if extras:
        raise SchemaViolation(f"unknown field(s) {extras}", locus)


def _number(value: Any, locus: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"expected a number, got {type(value).__name__}", locus)
    return float(value)


def _check_version(obj: Mapping, locus: str) -> None:
    version = _require(obj, "schema_version", locus)
    if version != SCHEMA_VERSION:
        raise SchemaViolation(f"unsupported schema_version {version!r}", f"{locus}.schema_version".lstrip("."))


def _check_user_id(value: Any, locus: str) -> str:
    if not isinstance(value, str) or not USER_ID_RE.match(value):
        raise SchemaViolation("user ids must match [a-z0-9_-]{1,64}", locus)
    return value


# -- tap sequences ------------------------------------------------------

def parse_taps(items: Any, locus: str, meta: Optional[SampleMeta] = None) -> RawTapSequence:
    if not isinstance(items, list) or not items:
        raise SchemaViolation("expected a non-empty list of taps", locus)
    taps = []
    for i, tap in enumerate(items):
        tap_locus = f"{locus}[{i}]"
        if not isinstance(tap, Mapping):
            raise SchemaViolation("expected a tap object", tap_locus)
        _no_extras(tap, _TAP_FIELDS, tap_locus)
        values = {f: _number(_require(tap, f, tap_locus), f"{tap_locus}.{f}") for f in _TAP_FIELDS}
        taps.append(RawTap(**values))
    return RawTapSequence(taps, meta=meta)


def taps_to_obj(seq: RawTapSequence) -> list[dict]:
    return [
        {"down_ts": t.down_ts, "up_ts": t.up_ts, "pressure": t.pressure, "size": t.size}
        for t in seq.taps
    ]


# -- labeled datasets ---------------------------------------------------

def parse_dataset(obj: Any) -> LabeledDataset:
    _check_version(obj, "")
    _no_extras(obj, ("schema_version", "users"), "")
    users_obj = _require(obj, "users", "")
    if not isinstance(users_obj, list) or not users_obj:
        raise SchemaViolation("expected a non-empty list", "users")

    users = []
    for ui, user_obj in enumerate(users_obj):
        locus = f"users[{ui}]"
        _no_extras(user_obj, ("user_id", "samples"), locus)
        user_id = _check_user_id(_require(user_obj, "user_id", locus), f"{locus}.user_id")
        samples_obj = _require(user_obj, "samples", locus)
        if not isinstance(samples_obj, list) or not samples_obj:
            raise SchemaViolation("expected a non-empty list", f"{locus}.samples")

        genuine, attacks = [], {k: [] for k in ATTACK_KINDS}
        for si, sample in enumerate(samples_obj):
            s_locus = f"{locus}.samples[{si}]"
            _no_extras(sample, ("condition", "kind", "attacker_id", "taps"), s_locus)
            condition = _require(sample, "condition", s_locus)
            if condition not in _CONDITIONS:
                raise SchemaViolation(
                    f"condition must be one of {_CONDITIONS}, got {condition!r}",
                    f"{s_locus}.condition",
                )
            kind = _require(sample, "kind", s_locus)
            if kind not in _KINDS:
                raise SchemaViolation(
                    f"kind must be one of {_KINDS}, got {kind!r}", f"{s_locus}.kind"
                )
            attacker_id = sample.get("attacker_id")
            if attacker_id is not None and not isinstance(attacker_id, str):
                raise SchemaViolation("attacker_id must be a string", f"{s_locus}.attacker_id")
            meta = SampleMeta(
                user_id=user_id, condition=condition, kind=kind, attacker_id=attacker_id
            )
            seq = parse_taps(_require(sample, "taps", s_locus), f"{s_locus}.taps", meta)
            if kind == "genuine":
                genuine.append(seq)
            else:
                attacks[kind].append(seq)

        users.append(UserSamples(user_id=user_id, genuine=genuine, attacks=attacks))

    ds = LabeledDataset(users)
    try:
        ds.validate()
    except TapmeinError as exc:
        raise SchemaViolation(str(exc), "users") from exc
    return ds


def dataset_to_obj(ds: LabeledDataset) -> dict:
    users = []
    for u in ds.users:
        samples = []
        for seq in u.genuine:
            samples.append(_sample_obj(seq, "genuine"))
        for kind in ATTACK_KINDS:
            for seq in u.attacks.get(kind, ()):
                samples.append(_sample_obj(seq, kind))
        users.append({"user_id": u.user_id, "samples": samples})
    return {"schema_version": SCHEMA_VERSION, "users": users}


def _sample_obj(seq: RawTapSequence, kind: str) -> dict:
    meta = seq.meta or SampleMeta()
    obj = {
        "condition": meta.condition if meta.condition in _CONDITIONS else "sitting",
        "kind": kind,
        "taps": taps_to_obj(seq),
    }
    if meta.attacker_id is not None:
        obj["attacker_id"] = meta.attacker_id
    return obj


# -- population statistics ----------------------------------------------

def parse_population_stats(obj: Any) -> PopulationStats:
    _check_version(obj, "")
    _no_extras(obj, ("schema_version", "sample_count", "provenance") + CHANNELS, "")
    count = _require(obj, "sample_count", "")
    if not isinstance(count, int) or count < 1:
        raise SchemaViolation("sample_count must be a positive integer", "sample_count")
    provenance = obj.get("provenance")
    if provenance is not None and not isinstance(provenance, str):
        raise SchemaViolation("provenance must be a string", "provenance")

    channels = {}
    for name in CHANNELS:
        ch = _require(obj, name, "")
        _no_extras(ch, ("min", "max", "mean", "std"), name)
        values = {f: _number(_require(ch, f, name), f"{name}.{f}") for f in ("min", "max", "mean", "std")}
        try:
            channels[name] = ChannelStats(**values)
        except ValueError as exc:
            raise SchemaViolation(str(exc), name) from exc
    return PopulationStats(sample_count=count, provenance=provenance, **channels)


def population_stats_to_obj(stats: PopulationStats) -> dict:
    obj: dict = {"schema_version": SCHEMA_VERSION, "sample_count": stats.sample_count}
    if stats.provenance is not None:
        obj["provenance"] = stats.provenance
    for name in CHANNELS:
        ch = stats.channel(name)
        obj[name] = {"min": ch.min, "max": ch.max, "mean": ch.mean, "std": ch.std}
    return obj


# -- sample files (CLI enroll/verify inputs) ------------------------------

def parse_sample_file(obj: Any) -> list[RawTapSequence]:
    """A sample document: either {"taps": [...]} or {"samples": [{"taps": [...]}...]}."""
    _check_version(obj, "")
    if "taps" in obj:
        _no_extras(obj, ("schema_version", "taps"), "")
        return [parse_taps(obj["taps"], "taps")]
    _no_extras(obj, ("schema_version", "samples"), "")
    samples_obj = _require(obj, "samples", "")
    if not isinstance(samples_obj, list) or not samples_obj:
        raise SchemaViolation("expected a non-empty list", "samples")
    out = []
    for i, sample in enumerate(samples_obj):
        locus = f"samples[{i}]"
        _no_extras(sample, ("taps",), locus)
        out.append(parse_taps(_require(sample, "taps", locus), f"{locus}.taps"))
    return out


# -- file IO --------------------------------------------------------------

def _dump_json(obj: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_json(path: Union[str, Path]) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"not valid JSON: {exc}", str(path)) from exc


def import_dataset(path: Union[str, Path]) -> LabeledDataset:
    return parse_dataset(_load_json(path))


def export_dataset(ds: LabeledDataset, path: Union[str, Path]) -> None:
    _dump_json(dataset_to_obj(ds), path)


def load_population_stats(path: Union[str, Path]) -> PopulationStats:
    return parse_population_stats(_load_json(path))


def dump_population_stats(stats: PopulationStats, path: Union[str, Path]) -> None:
    _dump_json(population_stats_to_obj(stats), path)


def load_sample_file(path: Union[str, Path]) -> list[RawTapSequence]:
    return parse_sample_file(_load_json(path))
