"""JSON schemas for task files, certificates and surface data."""
from __future__ import annotations

import jsonschema

from .errors import ValidationError

WORD = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "string"}, {"type": "integer"}],
        "minItems": 2,
        "maxItems": 2,
    },
}

PRESENTATION = {
    "type": "object",
    "required": ["generators"],
    "additionalProperties": False,
    "properties": {
        "generators": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "weight", "order"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "weight": {"type": "integer", "minimum": 1},
                    "order": {"oneOf": [{"type": "null"}, {"type": "integer", "minimum": 2}]},
                },
            },
        },
        "powers": {"type": "object", "additionalProperties": WORD},
        "commutators": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["left", "right", "word"],
                "additionalProperties": False,
                "properties": {"left": {"type": "string"}, "right": {"type": "string"}, "word": WORD},
            },
        },
    },
}

PRESENTATION_REF = {"oneOf": [{"type": "string"}, PRESENTATION]}

AUTOMORPHISM = {
    "type": "object",
    "required": ["images"],
    "additionalProperties": False,
    "properties": {
        "images": {"type": "object", "additionalProperties": WORD},
        "inverse_images": {"type": "object", "additionalProperties": WORD},
    },
}

MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

LABELING = {
    "type": "object",
    "required": ["modulus"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["ab-matrix", "matrix"]},
        "modulus": {"type": "integer", "minimum": 1},
        "images": {"type": "array", "items": MATRIX},
        "subgroup": {"type": "array", "items": MATRIX},
    },
}

PARAMS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "modulus": {"type": "integer", "minimum": 1},
        "words": {"type": "array", "items": WORD},
        "L": {"type": "array", "items": WORD},
        "q": {"type": "array", "items": WORD},
        "r": {"type": "array", "items": WORD},
        "strategy": {"enum": ["auto", "unipotent", "finite-image", "provided"]},
        "provided": {"type": "array", "items": WORD},
        "budget": {"type": "integer", "minimum": 1},
    },
}

TASK = {
    "type": "object",
    "required": ["presentation"],
    "additionalProperties": False,
    "properties": {
        "presentation": PRESENTATION_REF,
        "params": PARAMS,
        "generators": {"type": "array", "items": AUTOMORPHISM},
        "labeling": LABELING,
    },
}

CERTIFICATE = {
    "type": "object",
    "required": ["quotient", "claim", "transcript"],
    "additionalProperties": False,
    "properties": {
        "quotient": {
            "type": "object",
            "required": ["exponent", "order", "presentation", "map"],
            "additionalProperties": False,
            "properties": {
                "exponent": {"type": "integer", "minimum": 1},
                "order": {"type": "integer", "minimum": 1},
                "presentation": PRESENTATION,
                "map": {"type": "object", "additionalProperties": WORD},
            },
        },
        "claim": {
            "type": "object",
            "required": ["presentation", "generators", "labeling"],
            "additionalProperties": False,
            "properties": {
                "presentation": PRESENTATION,
                "generators": {"type": "array", "items": AUTOMORPHISM},
                "labeling": LABELING,
            },
        },
        "transcript": {"type": "array", "items": {"type": "object"}},
    },
}

CURVE = {
    "oneOf": [
        {
            "type": "object",
            "required": ["type", "vector"],
            "additionalProperties": False,
            "properties": {"type": {"const": "nonseparating"},
                           "vector": {"type": "array", "items": {"type": "integer"}},
                           "multiplicity": {"type": "integer"}},
        },
        {
            "type": "object",
            "required": ["type", "genus"],
            "additionalProperties": False,
            "properties": {"type": {"const": "separating"}, "genus": {"type": "integer", "minimum": 1},
                           "multiplicity": {"type": "integer"}},
        },
    ]
}

SURFACE = {
    "type": "object",
    "required": ["genus"],
    "additionalProperties": False,
    "properties": {
        "genus": {"type": "integer", "minimum": 1},
        "punctures": {"type": "integer", "minimum": 0},
        "curves": {"type": "array", "items": CURVE},
        "d": {"type": "integer", "minimum": 1},
        "gamma": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
}


def format_path(parts) -> str:
    out = ""
    for p in parts:
        if isinstance(p, int):
            out += f"[{p}]"
        else:
            out += f".{p}" if out else str(p)
    return out


def _generator_hint(root, parts) -> str:
    """Name the generator an error sits under, if any."""
    node = root
    hint = ""
    for i, p in enumerate(parts):
        try:
            node = node[p]
        except (KeyError, IndexError, TypeError):
            break
        if i > 0 and parts[i - 1] == "generators" and isinstance(node, dict) and "name" in node:
            hint = f"generator {node['name']!r}: "
    return hint


def validate(data, schema: dict, what: str = ""):
    """Raise :class:`ValidationError` with the path of the first problem."""
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if not errors:
        return
    err = errors[0]
    # descend into oneOf branches to the most specific cause
    while err.context:
        err = sorted(err.context, key=lambda e: -len(e.absolute_path))[0]
    parts = list(err.absolute_path)
    path = format_path(parts)
    raise ValidationError(path or what, _generator_hint(data, parts) + err.message)
