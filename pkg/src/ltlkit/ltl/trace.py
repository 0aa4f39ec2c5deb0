"""Lasso-shaped traces: a finite prefix followed by a loop repeated forever.

Position ``i`` steps to ``i + 1`` inside the word and wraps from the last
loop position back to the start of the loop, so the infinite word is
``prefix . loop . loop . ...`` while storage stays finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ast import ATOM_NAME_RE


@dataclass(frozen=True)
class LassoTrace:
    alphabet: tuple[str, ...]
    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise ValueError("lasso loop must contain at least one step")
        seen = set()
        for name in self.alphabet:
            if not ATOM_NAME_RE.match(name):
                raise ValueError(f"invalid atom name in alphabet: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate atom in alphabet: {name!r}")
            seen.add(name)
        for step in self.prefix + self.loop:
            extra = step - seen
            if extra:
                raise ValueError(f"step uses atoms outside the alphabet: {sorted(extra)}")

    @property
    def positions(self) -> int:
        """Number of distinct stored positions (prefix plus one loop lap)."""
        return len(self.prefix) + len(self.loop)

    def successor(self, position: int) -> int:
        if position < 0 or position >= self.positions:
            raise IndexError(f"position {position} out of range")
        if position == self.positions - 1:
            return len(self.prefix)
        return position + 1

    def step(self, position: int) -> frozenset[str]:
        if position < 0 or position >= self.positions:
            raise IndexError(f"position {position} out of range")
        if position < len(self.prefix):
            return self.prefix[position]
        return self.loop[position - len(self.prefix)]

    def holds(self, position: int, atom: str) -> bool:
        return atom in self.step(position)


def make_trace(
    alphabet: Iterable[str],
    prefix: Sequence[Iterable[str]],
    loop: Sequence[Iterable[str]],
) -> LassoTrace:
    """Build a trace from plain iterables, e.g. lists of atom-name lists."""
    return LassoTrace(
        alphabet=tuple(alphabet),
        prefix=tuple(frozenset(step) for step in prefix),
        loop=tuple(frozenset(step) for step in loop),
    )


def trace_to_json(trace: LassoTrace) -> dict:
    """Plain-JSON shape with sorted atom lists, stable across runs."""
    return {
        "alphabet": sorted(trace.alphabet),
        "prefix": [sorted(step) for step in trace.prefix],
        "loop": [sorted(step) for step in trace.loop],
    }


def trace_from_json(payload: dict) -> LassoTrace:
    return make_trace(payload["alphabet"], payload["prefix"], payload["loop"])
