"""Abstract syntax trees for linear temporal logic formulas.

Nodes are immutable; structural equality and hashing come from the frozen
dataclasses, so formulas can be used as dictionary keys and compared after
parser round-trips.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

ATOM_NAME_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")


@dataclass(frozen=True)
class Formula:
    """Base class for all formula nodes."""


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        if not ATOM_NAME_RE.match(self.name):
            raise ValueError(f"invalid atom name: {self.name!r}")


@dataclass(frozen=True)
class TrueBool(Formula):
    pass


@dataclass(frozen=True)
class FalseBool(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


UNARY_NODES = (Not, Next, Eventually, Always)
BINARY_NODES = (And, Or, Implies, Iff, Until, WeakUntil, Release)


def children(formula: Formula) -> tuple[Formula, ...]:
    if isinstance(formula, UNARY_NODES):
        return (formula.operand,)
    if isinstance(formula, BINARY_NODES):
        return (formula.left, formula.right)
    return ()


def walk(formula: Formula) -> Iterator[Formula]:
    """Yield every node of the formula tree, parents before children."""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atoms(formula: Formula) -> frozenset[str]:
    """The set of atomic proposition names occurring in the formula."""
    return frozenset(node.name for node in walk(formula) if isinstance(node, Atom))


def node_count(formula: Formula) -> int:
    return sum(1 for _ in walk(formula))
