"""Flat key-value configuration files.

One `key = value` pair per line; `#` starts a comment. Values are parsed
as JSON where possible (numbers, booleans, lists) and kept as raw strings
otherwise. Command-line `--set key=value` pairs override file keys.
"""

from __future__ import annotations

import json
from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_value(raw: str):
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def read_config_file(path: str | Path) -> dict:
    entries: dict = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        entries[key.strip()] = parse_value(raw)
    return entries


def apply_overrides(entries: dict, pairs: list[str]) -> dict:
    out = dict(entries)
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        out[key.strip()] = parse_value(raw)
    return out


def validate_keys(entries: dict, allowed: set, context: str) -> None:
    unknown = sorted(set(entries) - allowed)
    if unknown:
        raise ConfigError(
            f"invalid {context} keys: {', '.join(unknown)}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )
