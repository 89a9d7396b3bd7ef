"""Experiment file schema and loading.

An experiment file is JSON with ``version`` 1 and a ``kind`` of
``ensemble``, ``crossover``, ``protein`` or ``analytic``.  Unknown keys are
rejected at every level.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

VERSION = 1

_prob = {"type": "number", "minimum": 0, "maximum": 1}

NETWORK = {
    "type": "object",
    "additionalProperties": False,
    "required": ["layers"],
    "properties": {
        "layers": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "intra_p": {"type": "array", "items": _prob},
        "inter_p": {"type": "array", "items": _prob},
        "diag_mode": {"enum": ["random", "zero"]},
        "off_diag_mode": {"enum": ["random", "identity", "zero"]},
        "scaling": {"enum": ["none", "probability_based", "edge_count_based"]},
        "gamma": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "seed": {"type": ["integer", "null"]},
    },
}

HISTOGRAM = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "bin_width": {"type": "number", "exclusiveMinimum": 0},
        "support_cut": {"type": "number", "exclusiveMinimum": 0},
    },
}

_common = {
    "version": {"const": VERSION},
    "kind": {"type": "string"},
    "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
    "plots": {"type": "boolean"},
    "histogram": HISTOGRAM,
}

_k_orders = {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 4}, "minItems": 1}

_paper_scale = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "layers": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "realizations": {"type": "integer", "minimum": 1},
    },
}

ENSEMBLE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "kind", "name", "network"],
    "properties": {
        **_common,
        "kind": {"const": "ensemble"},
        "network": NETWORK,
        "realizations": {"type": "integer", "minimum": 1},
        "k_orders": _k_orders,
        "master_seed": {"type": "integer", "minimum": 0},
        "expected_m": {"type": "integer", "minimum": 1, "maximum": 4},
        "paper_scale": _paper_scale,
    },
}

CROSSOVER = {
    **ENSEMBLE,
    "required": ["version", "kind", "name", "network", "gammas"],
    "properties": {
        **ENSEMBLE["properties"],
        "kind": {"const": "crossover"},
        "gammas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
    },
}

PROTEIN = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "kind", "name", "pdb", "partition", "sweep"],
    "properties": {
        **_common,
        "kind": {"const": "protein"},
        "pdb": {"type": "string"},
        "atom": {"type": "string"},
        "k_orders": _k_orders,
        "partition": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["by_chain", "by_count", "explicit"]},
                "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "ranges": {"type": "array", "items": {
                    "type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mode", "values"],
            "properties": {
                "mode": {"enum": ["joint", "inter_only"]},
                "values": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                "td": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

ANALYTIC = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "kind", "name", "alphas"],
    "properties": {
        **_common,
        "kind": {"const": "analytic"},
        "alphas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": -1, "maximum": 20},
                   "minItems": 1},
        "rmax": {"type": "number", "exclusiveMinimum": 0},
        "step": {"type": "number", "exclusiveMinimum": 0},
    },
}

SCHEMAS = {"ensemble": ENSEMBLE, "crossover": CROSSOVER, "protein": PROTEIN, "analytic": ANALYTIC}


class ExperimentError(ValueError):
    pass


def validate(doc: dict, kind: str | None = None) -> dict:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ExperimentError("experiment file must be a JSON object with a 'kind'")
    if kind is not None and doc["kind"] != kind:
        raise ExperimentError(f"expected a {kind!r} experiment, got {doc['kind']!r}")
    schema = SCHEMAS.get(doc["kind"])
    if schema is None:
        raise ExperimentError(f"unknown experiment kind {doc['kind']!r}; expected one of {sorted(SCHEMAS)}")
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ExperimentError(f"{where}: {exc.message}") from None
    return doc


def load(path, kind: str | None = None) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ExperimentError(f"experiment file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ExperimentError(f"{path}: invalid JSON ({exc})") from None
    return validate(doc, kind)
