"""Serializable bound reports.

JSON is canonical and lossless (python float repr round-trips); the witness
payload is digested so that the compact summary stays comparable across runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


@dataclass
class BoundReport:
    name: str
    value: float
    params: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    gap: float = 0.0
    iterations: int = 0
    seed: int | None = None
    c: float | None = None
    status: str = "ok"

    def witness_digest(self) -> str:
        return hashlib.sha256(canonical_json(self.witness).encode()).hexdigest()

    def summary(self) -> dict:
        out = {
            "name": self.name,
            "value": self.value,
            "witness_digest": self.witness_digest(),
            "residuals": _jsonable(self.residuals),
            "gap": self.gap,
            "iterations": self.iterations,
            "seed": self.seed,
        }
        if self.c is not None:
            out["c"] = self.c
        return out

    def to_dict(self) -> dict:
        out = self.summary()
        out["status"] = self.status
        out["params"] = _jsonable(self.params)
        out["witness"] = _jsonable(self.witness)
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        d = json.loads(text)
        return cls(
            name=d["name"], value=d["value"], params=d.get("params", {}),
            witness=d.get("witness", {}), residuals=d.get("residuals", {}),
            gap=d.get("gap", 0.0), iterations=d.get("iterations", 0),
            seed=d.get("seed"), c=d.get("c"), status=d.get("status", "ok"),
        )
