"""Consensus over sampled completions: votes, confidence, alternatives.

Candidates are keyed by the canonical printed form of their parsed
formula, so differently spelled but structurally identical outputs vote
together.  Confidence divides by the number of requested runs, not by the
number of parseable completions: a model that fails to produce a formula
in some runs is genuinely less trustworthy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ltl import Formula, canonical, parse
from .responses import ParsedCompletion, ParsedEntry


class NoCandidateError(Exception):
    """No completion yielded a usable final formula."""


@dataclass(frozen=True)
class ScoredCandidate:
    formula: Formula
    text: str
    votes: int
    confidence: float


@dataclass(frozen=True)
class FragmentScores:
    fragment: str
    best: ScoredCandidate
    alternatives: tuple[ScoredCandidate, ...]


@dataclass(frozen=True)
class AggregatedResult:
    final: ScoredCandidate
    final_alternatives: tuple[ScoredCandidate, ...]
    sub_translations: tuple[FragmentScores, ...]
    runs: int
    parsed_count: int


class _Tally:
    """Vote counts for one slot (the final formula or one fragment)."""

    def __init__(self) -> None:
        self.first_seen: dict[str, int] = {}
        self.entries: dict[str, ParsedEntry] = {}
        self.votes: dict[str, int] = {}

    def add(self, entry: ParsedEntry) -> None:
        key = canonical(entry.formula)
        if key not in self.votes:
            self.first_seen[key] = len(self.first_seen)
            self.entries[key] = entry
            self.votes[key] = 0
        self.votes[key] += 1

    def ranked(self, runs: int) -> list[ScoredCandidate]:
        keys = sorted(
            self.votes, key=lambda key: (-self.votes[key], self.first_seen[key])
        )
        return [
            ScoredCandidate(
                formula=self.entries[key].formula,
                text=self.entries[key].text,
                votes=self.votes[key],
                confidence=self.votes[key] / runs,
            )
            for key in keys
        ]


def _normalize_fragment(fragment: str) -> str:
    return " ".join(fragment.split())


def aggregate(parsed: list[ParsedCompletion], runs: int) -> AggregatedResult:
    """Tally the final formulas and every fragment across completions.

    ``parsed`` holds only the completions that produced a parseable final
    formula; ``runs`` is how many were requested.  Ties rank by first
    appearance across the completion list, which makes the result stable
    for a fixed list order while vote counts are order-independent.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if len(parsed) > runs:
        raise ValueError("more parsed completions than requested runs")
    if not parsed:
        raise NoCandidateError("no completion yielded a parseable final formula")

    final_tally = _Tally()
    fragment_order: list[str] = []
    fragment_display: dict[str, str] = {}
    fragment_tallies: dict[str, _Tally] = {}
    for completion in parsed:
        final_tally.add(completion.final)
        for fragment, entry in completion.dictionary:
            key = _normalize_fragment(fragment)
            if key not in fragment_tallies:
                fragment_order.append(key)
                fragment_display[key] = fragment
                fragment_tallies[key] = _Tally()
            fragment_tallies[key].add(entry)

    finals = final_tally.ranked(runs)
    sub_translations = tuple(
        FragmentScores(
            fragment=fragment_display[key],
            best=ranked[0],
            alternatives=tuple(ranked[1:]),
        )
        for key in fragment_order
        for ranked in [fragment_tallies[key].ranked(runs)]
    )
    return AggregatedResult(
        final=finals[0],
        final_alternatives=tuple(finals[1:]),
        sub_translations=sub_translations,
        runs=runs,
        parsed_count=len(parsed),
    )


def candidate_to_json(candidate: ScoredCandidate) -> dict:
    return {
        "formula": canonical(candidate.formula),
        "text": candidate.text,
        "votes": candidate.votes,
        "confidence": candidate.confidence,
    }


def candidate_from_json(payload: dict) -> ScoredCandidate:
    return ScoredCandidate(
        formula=parse(payload["formula"]),
        text=payload["text"],
        votes=payload["votes"],
        confidence=payload["confidence"],
    )


def result_to_json(result: AggregatedResult) -> dict:
    return {
        "final": candidate_to_json(result.final),
        "finalAlternatives": [
            candidate_to_json(candidate) for candidate in result.final_alternatives
        ],
        "subTranslations": [
            {
                "fragment": scores.fragment,
                "best": candidate_to_json(scores.best),
                "alternatives": [
                    candidate_to_json(candidate) for candidate in scores.alternatives
                ],
            }
            for scores in result.sub_translations
        ],
        "runs": result.runs,
        "parsedCount": result.parsed_count,
    }


def result_from_json(payload: dict) -> AggregatedResult:
    return AggregatedResult(
        final=candidate_from_json(payload["final"]),
        final_alternatives=tuple(
            candidate_from_json(item) for item in payload["finalAlternatives"]
        ),
        sub_translations=tuple(
            FragmentScores(
                fragment=item["fragment"],
                best=candidate_from_json(item["best"]),
                alternatives=tuple(
                    candidate_from_json(alt) for alt in item["alternatives"]
                ),
            )
            for item in payload["subTranslations"]
        ),
        runs=payload["runs"],
        parsed_count=payload["parsedCount"],
    )
