"""Rendering and lenient parsing of fragment-to-formula dictionaries.

These one-line dictionaries appear in prompt templates, in model
completions, and in the interactive prompt tail, so one module owns both
directions.  Rendering is strict JSON-style with insertion order preserved.
Parsing is deliberately forgiving: sampled completions mix JSON and Python
notation, drop braces, or leave trailing commas.
"""

from __future__ import annotations

import ast
import json
import re

_PAIR_RE = re.compile(r"[\"']([^\"']+)[\"']\s*:\s*[\"']([^\"']*)[\"']")


def render_pairs(pairs) -> str:
    """Render ordered (fragment, formula) pairs as a one-line dictionary.

    Accepts a mapping or an iterable of pairs; returns ``{}`` when empty.
    """
    items = list(pairs.items()) if hasattr(pairs, "items") else list(pairs)
    if not items:
        return "{}"
    inner = ", ".join(
        f"{json.dumps(str(key))}: {json.dumps(str(value))}" for key, value in items
    )
    return "{" + inner + "}"


def _coerce(value: object) -> str:
    return value if isinstance(value, str) else str(value)


def parse_pairs(text: str) -> tuple[list[tuple[str, str]], list[str]]:
    """Extract ordered string pairs from a dictionary-like line.

    Tries strict JSON, then Python literal syntax, then bare pair scanning.
    Returns the pairs plus human-readable warnings for anything skipped; an
    unrecognizable line yields no pairs and one warning.  Duplicate keys
    keep their first position with the last value, matching dict literals.
    """
    stripped = text.strip()
    if not stripped or stripped == "{}":
        return [], []
    for loader in (json.loads, ast.literal_eval):
        try:
            value = loader(stripped)
        except (ValueError, SyntaxError):
            continue
        if isinstance(value, dict):
            merged: dict[str, str] = {}
            for key, item in value.items():
                merged[_coerce(key)] = _coerce(item)
            return list(merged.items()), []
        break
    found: dict[str, str] = {}
    for match in _PAIR_RE.finditer(stripped):
        found[match.group(1)] = match.group(2)
    if found:
        return list(found.items()), []
    return [], [f"could not read a dictionary from: {stripped[:80]}"]
