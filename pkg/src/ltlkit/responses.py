"""Parsing one raw model completion into structured pieces.

A completion continues the prompt right after ``Explanation:``, so it is
expected to contain free-text reasoning, one ``Explanation dictionary:``
line, and one ``So, the final LTL translation is:`` line.  Sampled text is
messy, so everything except the final formula is treated leniently:
unreadable dictionary entries are dropped with a warning rather than
failing the completion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dicttext import parse_pairs
from .ltl import Formula, ParseError, parse
from .prompts import MARKER_DICTIONARY, MARKER_FINAL

_TRIM_QUOTES = "\"'`"


class ResponseParseError(ValueError):
    """The completion does not contain a usable final translation."""


@dataclass(frozen=True)
class ParsedEntry:
    """A formula together with the raw text the model wrote for it."""

    formula: Formula
    text: str


@dataclass(frozen=True)
class ParsedCompletion:
    explanation: str
    dictionary: tuple[tuple[str, ParsedEntry], ...]
    final: ParsedEntry
    raw: str
    warnings: tuple[str, ...]


def _trim(text: str) -> str:
    """Peel whitespace, trailing periods, and wrapping quotes, inside out."""
    previous = None
    while text != previous:
        previous = text
        text = text.strip()
        if text.endswith("."):
            text = text[:-1]
        text = text.strip(_TRIM_QUOTES)
    return text


def _parse_formula_text(text: str) -> ParsedEntry | None:
    cleaned = _trim(text)
    if not cleaned:
        return None
    try:
        return ParsedEntry(formula=parse(cleaned), text=cleaned)
    except ParseError:
        return None


def parse_completion(raw: str) -> ParsedCompletion:
    """Split a completion into explanation, dictionary, and final formula.

    Raises ResponseParseError when the final-translation marker is missing
    or no candidate reading of the final formula parses.  Dictionary
    problems never raise: broken entries are dropped one by one and
    reported in warnings.
    """
    final_start = raw.rfind(MARKER_FINAL)
    if final_start < 0:
        raise ResponseParseError(
            f"completion lacks the final-translation marker {MARKER_FINAL!r}"
        )
    final_text = raw[final_start + len(MARKER_FINAL):]
    final = _parse_formula_text(final_text)
    if final is None:
        first_line = final_text.strip().split("\n", 1)[0]
        final = _parse_formula_text(first_line)
    if final is None:
        raise ResponseParseError(
            f"final translation does not parse: {final_text.strip()[:120]!r}"
        )

    head = raw[:final_start]
    warnings: list[str] = []
    dictionary: list[tuple[str, ParsedEntry]] = []
    dict_start = head.rfind(MARKER_DICTIONARY)
    if dict_start < 0:
        explanation = head.strip()
        warnings.append("completion lacks an explanation dictionary")
    else:
        explanation = head[:dict_start].strip()
        dict_line = head[dict_start + len(MARKER_DICTIONARY):].split("\n", 1)[0]
        pairs, pair_warnings = parse_pairs(dict_line)
        warnings.extend(pair_warnings)
        for fragment, formula_text in pairs:
            fragment = fragment.strip()
            if not fragment:
                warnings.append("dropped dictionary entry with empty fragment")
                continue
            entry = _parse_formula_text(formula_text)
            if entry is None:
                warnings.append(
                    f"dropped dictionary entry {fragment!r}: "
                    f"{formula_text!r} does not parse"
                )
                continue
            dictionary.append((fragment, entry))
    return ParsedCompletion(
        explanation=explanation,
        dictionary=tuple(dictionary),
        final=final,
        raw=raw,
        warnings=tuple(warnings),
    )
