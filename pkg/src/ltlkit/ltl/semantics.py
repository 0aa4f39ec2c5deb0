"""Formula evaluation over lasso traces.

Each subformula is turned into a truth vector over the stored positions
(prefix plus one loop lap).  Until is the only temporal fixpoint: loop
positions start at false and are swept right-to-left until stable, then a
single backward pass fills the prefix.  The remaining temporal operators are
computed from Until and negation:

    F b       = true U b
    G b       = !(true U !b)
    a W b     = (a U b) | G a
    a R b     = !(!a U !b)
"""

from __future__ import annotations

from .ast import (
    Always,
    And,
    Atom,
    Eventually,
    FalseBool,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TrueBool,
    Until,
    WeakUntil,
    atoms,
)
from .trace import LassoTrace


class UnknownAtomError(ValueError):
    """A formula mentions atoms the trace's alphabet does not define."""

    def __init__(self, missing: frozenset[str]):
        self.missing = missing
        super().__init__(f"atoms not in trace alphabet: {sorted(missing)}")


def _until_vector(
    phi: list[bool], psi: list[bool], trace: LassoTrace
) -> list[bool]:
    n = trace.positions
    loop_start = len(trace.prefix)
    result = psi[:]
    for i in range(loop_start, n):
        result[i] = psi[i]
    # Least fixpoint over the loop: at most one extra sweep past stability.
    changed = True
    while changed:
        changed = False
        for i in range(n - 1, loop_start - 1, -1):
            value = psi[i] or (phi[i] and result[trace.successor(i)])
            if value != result[i]:
                result[i] = value
                changed = True
    for i in range(loop_start - 1, -1, -1):
        result[i] = psi[i] or (phi[i] and result[i + 1])
    return result


def _vector(formula: Formula, trace: LassoTrace, memo: dict) -> list[bool]:
    cached = memo.get(formula)
    if cached is not None:
        return cached
    n = trace.positions
    if isinstance(formula, Atom):
        result = [formula.name in trace.step(i) for i in range(n)]
    elif isinstance(formula, TrueBool):
        result = [True] * n
    elif isinstance(formula, FalseBool):
        result = [False] * n
    elif isinstance(formula, Not):
        child = _vector(formula.operand, trace, memo)
        result = [not value for value in child]
    elif isinstance(formula, Next):
        child = _vector(formula.operand, trace, memo)
        result = [child[trace.successor(i)] for i in range(n)]
    elif isinstance(formula, And):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        result = [a and b for a, b in zip(left, right)]
    elif isinstance(formula, Or):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        result = [a or b for a, b in zip(left, right)]
    elif isinstance(formula, Implies):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        result = [(not a) or b for a, b in zip(left, right)]
    elif isinstance(formula, Iff):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        result = [a == b for a, b in zip(left, right)]
    elif isinstance(formula, Until):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        result = _until_vector(left, right, trace)
    elif isinstance(formula, Eventually):
        child = _vector(formula.operand, trace, memo)
        result = _until_vector([True] * n, child, trace)
    elif isinstance(formula, Always):
        child = _vector(formula.operand, trace, memo)
        eventually_not = _until_vector([True] * n, [not v for v in child], trace)
        result = [not value for value in eventually_not]
    elif isinstance(formula, WeakUntil):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        until = _until_vector(left, right, trace)
        eventually_not = _until_vector([True] * n, [not v for v in left], trace)
        result = [u or (not e) for u, e in zip(until, eventually_not)]
    elif isinstance(formula, Release):
        left = _vector(formula.left, trace, memo)
        right = _vector(formula.right, trace, memo)
        inner = _until_vector([not v for v in left], [not v for v in right], trace)
        result = [not value for value in inner]
    else:
        raise TypeError(f"unknown formula node: {formula!r}")
    memo[formula] = result
    return result


def truth_table(formula: Formula, trace: LassoTrace) -> tuple[bool, ...]:
    """The formula's value at every stored position of the trace."""
    missing = atoms(formula) - set(trace.alphabet)
    if missing:
        raise UnknownAtomError(missing)
    return tuple(_vector(formula, trace, {}))


def evaluate(formula: Formula, trace: LassoTrace, position: int = 0) -> bool:
    """Whether the trace satisfies the formula at the given position."""
    if position < 0 or position >= trace.positions:
        raise IndexError(f"position {position} out of range")
    return truth_table(formula, trace)[position]
