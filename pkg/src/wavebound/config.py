"""Tiny JSON-config validation for the CLI: typed fields, unknown keys rejected."""

from __future__ import annotations

import json
from dataclasses import dataclass

__all__ = ["ConfigError", "Field", "load_json", "validate", "parse_complex"]


class ConfigError(ValueError):
    """Malformed or schema-violating configuration."""


@dataclass(frozen=True)
class Field:
    types: tuple
    required: bool = True
    default: object = None


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("top-level config must be a JSON object")
    return obj


def validate(obj: dict, schema: dict[str, Field], where: str = "config") -> dict:
    """Check required/typed fields, fill defaults, and reject unknown keys."""
    unknown = set(obj) - set(schema)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    out = {}
    for key, field in schema.items():
        if key not in obj:
            if field.required:
                raise ConfigError(f"{where}: missing required key '{key}'")
            out[key] = field.default
            continue
        val = obj[key]
        if not isinstance(val, field.types):
            names = "/".join(t.__name__ for t in field.types)
            raise ConfigError(f"{where}: key '{key}' must be {names}, got {type(val).__name__}")
        out[key] = val
    return out


def parse_complex(value, where: str = "value") -> complex:
    """Accept a number, an [re, im] pair, or a Python-style complex string."""
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or not all(isinstance(v, (int, float)) for v in value):
            raise ConfigError(f"{where}: complex pair must be [re, im]")
        return complex(value[0], value[1])
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"{where}: cannot parse complex '{value}'") from exc
    raise ConfigError(f"{where}: cannot interpret {value!r} as a complex number")
