"""Claim reports, JSON schemas and content-hashed report envelopes."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any, Optional

import jsonschema
import numpy as np

from .errors import UsageError

VERDICTS = ("pass", "fail", "indeterminate")


def jsonable(value):
    """Convert numpy/complex/non-finite values into plain JSON data."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": jsonable(float(value.real)), "im": jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if value is None or isinstance(value, str):
        return value
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass
class ClaimReport:
    """Outcome of one computed comparison.

    ``verdict`` states whether the computed numbers met the comparison at
    ``tolerance``; it is never a statement about the truth of a theorem.
    """

    claim_id: str
    paper_anchor: str
    inputs: dict[str, Any]
    computed: dict[str, Any]
    verdict: str
    tolerance: float
    seed: Optional[int] = None
    notes: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise UsageError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return {
            "claim_id": self.claim_id,
            "paper_anchor": self.paper_anchor,
            "inputs": jsonable(self.inputs),
            "computed": jsonable(self.computed),
            "verdict": self.verdict,
            "tolerance": float(self.tolerance),
            "seed": self.seed,
            "notes": self.notes,
        }


def verdict_of(ok, decidable=True):
    if not decidable:
        return "indeterminate"
    return "pass" if ok else "fail"


_number = {"oneOf": [{"type": "number"}, {"enum": ["nan", "inf", "-inf"]}]}
_complex = {
    "type": "object",
    "properties": {"re": _number, "im": _number},
    "required": ["re", "im"],
    "additionalProperties": False,
}

CLAIM_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ClaimReport",
    "type": "object",
    "properties": {
        "claim_id": {"type": "string", "minLength": 1},
        "paper_anchor": {"type": "string", "minLength": 1},
        "inputs": {"type": "object"},
        "computed": {"type": "object"},
        "verdict": {"enum": list(VERDICTS)},
        "tolerance": {"type": "number", "minimum": 0},
        "seed": {"type": ["integer", "null"]},
        "notes": {"type": "string"},
    },
    "required": ["claim_id", "paper_anchor", "inputs", "computed", "verdict", "tolerance", "seed"],
    "additionalProperties": False,
}

_verdict_field = {"enum": list(VERDICTS)}

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "BiunivalenceCertificate",
    "type": "object",
    "properties": {
        "a2_modulus": _number,
        "netanyahu_pass": _verdict_field,
        "lemma2_pass": _verdict_field,
        "grunsky_f_norm": _number,
        "grunsky_inverse_norm": _number,
        "covering_radius": _number,
        "numeric_univalence": _verdict_field,
        "overall": {"enum": ["certified", "refuted", "indeterminate"]},
        "errors": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "required": [
        "a2_modulus",
        "netanyahu_pass",
        "lemma2_pass",
        "grunsky_f_norm",
        "grunsky_inverse_norm",
        "covering_radius",
        "numeric_univalence",
        "overall",
    ],
    "additionalProperties": False,
}

EXPERIMENT_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ExperimentReport",
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "k": {"type": "number"},
        "trials": {"type": "integer", "minimum": 0},
        "per_trial": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "index": {"type": "integer"},
                    "phi_norm": _number,
                    "a2_modulus": _number,
                    "a2_max_modulus": _number,
                    "solver_residual": _number,
                    "certificate": {"oneOf": [CERTIFICATE_SCHEMA, {"type": "null"}]},
                    "error": {"type": ["string", "null"]},
                },
                "required": ["index", "phi_norm", "a2_modulus", "certificate"],
            },
        },
        "aggregates": {"type": "object"},
        "sampling": {"type": "object"},
    },
    "required": ["seed", "k", "trials", "per_trial", "aggregates"],
}

ENVELOPE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ReportEnvelope",
    "type": "object",
    "properties": {
        "kind": {"enum": ["claim", "experiment", "certificate", "grunsky", "schwarzian", "inversion", "distortion"]},
        "content_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "config": {"type": "object"},
        "body": {"type": "object"},
    },
    "required": ["kind", "content_hash", "config", "body"],
    "additionalProperties": False,
}

BODY_SCHEMAS = {
    "claim": CLAIM_REPORT_SCHEMA,
    "experiment": EXPERIMENT_REPORT_SCHEMA,
    "certificate": CERTIFICATE_SCHEMA,
}


def seal(kind, body, config):
    """Wrap a report body with its run configuration and a content hash."""
    payload = {"kind": kind, "config": jsonable(config), "body": jsonable(body)}
    return {"kind": kind, "content_hash": content_hash(payload), "config": payload["config"], "body": payload["body"]}


def verify_envelope(doc):
    """True iff the stored hash matches the envelope content."""
    payload = {"kind": doc["kind"], "config": doc["config"], "body": doc["body"]}
    return content_hash(payload) == doc["content_hash"]


def validate(doc):
    """Raise ``jsonschema.ValidationError`` if an envelope or its body is malformed."""
    jsonschema.validate(doc, ENVELOPE_SCHEMA)
    schema = BODY_SCHEMAS.get(doc["kind"])
    if schema is not None:
        jsonschema.validate(doc["body"], schema)


def dump(doc) -> str:
    """Deterministic pretty JSON for files on disk (hash header first)."""
    ordered = {"content_hash": doc["content_hash"], "kind": doc["kind"], "config": doc["config"], "body": doc["body"]}
    return json.dumps(ordered, indent=2, allow_nan=False) + "\n"
