"""Profile persistence: one checksummed JSON document per user id.

Writes are atomic (temp file + rename), so a profile is either fully
present with a valid checksum or absent; loads verify the checksum and
refuse tampered or truncated documents. Serialization round-trips every
model number at full double precision, so a reloaded profile makes
byte-for-byte identical decisions.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path
from typing import Union

import numpy as np

from tapmein.authflow import UserProfile
from tapmein.errors import TapmeinError
from tapmein.gateway.documents import (
    SCHEMA_VERSION,
    USER_ID_RE,
    parse_population_stats,
    population_stats_to_obj,
)
from tapmein.learn import ForestModel, Standardizer, SvmModel
from tapmein.learn.forest import TreeArrays


class ProfileNotFound(TapmeinError):
    """No stored profile for the requested user id."""


class CorruptRecord(TapmeinError):
    """Stored profile fails its checksum or cannot be decoded."""


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _checksum(payload: dict) -> str:
    return hashlib.sha256(_canonical(payload)).hexdigest()


def _svm_to_obj(model: SvmModel) -> dict:
    return {
        "kind": "svm",
        "kernel": model.kernel,
        "gamma": model.gamma,
        "c": model.c,
        "bias": model.bias,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coef": model.dual_coef.tolist(),
        "converged": model.converged,
        "n_iter": model.n_iter,
    }


def _svm_from_obj(obj: dict) -> SvmModel:
    return SvmModel(
        support_vectors=np.array(obj["support_vectors"], dtype=float),
        dual_coef=np.array(obj["dual_coef"], dtype=float),
        bias=float(obj["bias"]),
        kernel=obj["kernel"],
        gamma=obj["gamma"],
        c=float(obj["c"]),
        converged=bool(obj["converged"]),
        n_iter=int(obj["n_iter"]),
    )


def _forest_to_obj(model: ForestModel) -> dict:
    return {
        "kind": "forest",
        "n_features": model.n_features,
        "tree_count": model.tree_count,
        "max_depth": model.max_depth,
        "min_leaf": model.min_leaf,
        "features_per_split": model.features_per_split,
        "seed": model.seed,
        "importances": model.importances.tolist(),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "counts": t.counts.tolist(),
            }
            for t in model.trees
        ],
    }


def _forest_from_obj(obj: dict) -> ForestModel:
    trees = tuple(
        TreeArrays(
            feature=t["feature"],
            threshold=t["threshold"],
            left=t["left"],
            right=t["right"],
            counts=t["counts"],
        )
        for t in obj["trees"]
    )
    return ForestModel(
        trees=trees,
        importances=np.array(obj["importances"], dtype=float),
        n_features=int(obj["n_features"]),
        tree_count=int(obj["tree_count"]),
        max_depth=obj["max_depth"],
        min_leaf=int(obj["min_leaf"]),
        features_per_split=int(obj["features_per_split"]),
        seed=int(obj["seed"]),
    )


def profile_to_payload(profile: UserProfile) -> dict:
    model_obj = (
        _svm_to_obj(profile.model)
        if profile.classifier_kind == "svm"
        else _forest_to_obj(profile.model)
    )
    return {
        "user_id": profile.user_id,
        "length": profile.length,
        "threshold": profile.threshold,
        "layout_version": profile.layout_version,
        "created_at": profile.created_at,
        "standardizer": {
            "mean": profile.standardizer.mean.tolist(),
            "scale": profile.standardizer.scale.tolist(),
        },
        "classifier": model_obj,
        "population_stats": population_stats_to_obj(profile.population_stats),
    }


def profile_from_payload(payload: dict) -> UserProfile:
    classifier = payload["classifier"]
    kind = classifier["kind"]
    model = _svm_from_obj(classifier) if kind == "svm" else _forest_from_obj(classifier)
    return UserProfile(
        user_id=payload["user_id"],
        length=int(payload["length"]),
        standardizer=Standardizer(
            mean=np.array(payload["standardizer"]["mean"], dtype=float),
            scale=np.array(payload["standardizer"]["scale"], dtype=float),
        ),
        classifier_kind=kind,
        model=model,
        threshold=float(payload["threshold"]),
        population_stats=parse_population_stats(payload["population_stats"]),
        created_at=payload.get("created_at"),
        layout_version=int(payload["layout_version"]),
    )


class ProfileStore:
    """One profile document per user id under a root directory."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, user_id: str) -> Path:
        if not USER_ID_RE.match(user_id or ""):
            raise ValueError(f"invalid user id {user_id!r}")
        return self.root / f"{user_id}.profile.json"

    def save_profile(self, profile: UserProfile, stamp_created_at: bool = True) -> None:
        if stamp_created_at and profile.created_at is None:
            from dataclasses import replace

            profile = replace(profile, created_at=time.time())
        payload = profile_to_payload(profile)
        body = {"schema_version": SCHEMA_VERSION, "profile": payload}
        record = dict(body, checksum=_checksum(body))
        path = self._path(profile.user_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)

    def load_profile(self, user_id: str) -> UserProfile:
        path = self._path(user_id)
        if not path.exists():
            raise ProfileNotFound(f"no profile stored for {user_id!r}")
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            body = {"schema_version": record["schema_version"], "profile": record["profile"]}
            stored = record["checksum"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptRecord(f"profile for {user_id!r} is unreadable: {exc}") from exc
        if _checksum(body) != stored:
            raise CorruptRecord(f"profile for {user_id!r} fails its checksum")
        if record["schema_version"] != SCHEMA_VERSION:
            raise CorruptRecord(
                f"profile for {user_id!r} has unsupported schema_version {record['schema_version']!r}"
            )
        payload = record["profile"]
        try:
            return profile_from_payload(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(f"profile for {user_id!r} cannot be decoded: {exc}") from exc

    def delete_profile(self, user_id: str) -> bool:
        path = self._path(user_id)
        if not path.exists():
            return False
        path.unlink()
        return True

    def exists(self, user_id: str) -> bool:
        return self._path(user_id).exists()

    def list_users(self) -> list[str]:
        return sorted(p.name[: -len(".profile.json")] for p in self.root.glob("*.profile.json"))
