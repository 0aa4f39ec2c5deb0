"""Independent reference semantics used to cross-check the library.

Deliberately a different algorithm from the library's vector fixpoint:
derived operators are first rewritten into a core of !, &, |, ->, <->, X, U,
then formulas are evaluated positionally, with Until resolved by walking
successor positions until an answer is forced.  A walk of prefix + 2 * loop
steps visits every position reachable from the start, so if the right side
never fired by then the Until is false.
"""

from __future__ import annotations

from ltlkit.ltl import (
    Always,
    And,
    Atom,
    Eventually,
    FalseBool,
    Formula,
    Iff,
    Implies,
    LassoTrace,
    Next,
    Not,
    Or,
    Release,
    TrueBool,
    Until,
    WeakUntil,
)


def to_core(formula: Formula) -> Formula:
    if isinstance(formula, (Atom, TrueBool, FalseBool)):
        return formula
    if isinstance(formula, Not):
        return Not(to_core(formula.operand))
    if isinstance(formula, Next):
        return Next(to_core(formula.operand))
    if isinstance(formula, Eventually):
        return Until(TrueBool(), to_core(formula.operand))
    if isinstance(formula, Always):
        return Not(Until(TrueBool(), Not(to_core(formula.operand))))
    if isinstance(formula, WeakUntil):
        left = to_core(formula.left)
        right = to_core(formula.right)
        return Or(Until(left, right), Not(Until(TrueBool(), Not(left))))
    if isinstance(formula, Release):
        left = to_core(formula.left)
        right = to_core(formula.right)
        return Not(Until(Not(left), Not(right)))
    if isinstance(formula, Until):
        return Until(to_core(formula.left), to_core(formula.right))
    if isinstance(formula, And):
        return And(to_core(formula.left), to_core(formula.right))
    if isinstance(formula, Or):
        return Or(to_core(formula.left), to_core(formula.right))
    if isinstance(formula, Implies):
        return Implies(to_core(formula.left), to_core(formula.right))
    if isinstance(formula, Iff):
        return Iff(to_core(formula.left), to_core(formula.right))
    raise TypeError(f"unknown formula node: {formula!r}")


def oracle_evaluate(formula: Formula, trace: LassoTrace, position: int = 0) -> bool:
    core = to_core(formula)
    horizon = len(trace.prefix) + 2 * len(trace.loop)
    memo: dict[tuple[int, int], bool] = {}

    def holds(node: Formula, pos: int) -> bool:
        key = (id(node), pos)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Atom):
            value = node.name in trace.step(pos)
        elif isinstance(node, TrueBool):
            value = True
        elif isinstance(node, FalseBool):
            value = False
        elif isinstance(node, Not):
            value = not holds(node.operand, pos)
        elif isinstance(node, Next):
            value = holds(node.operand, trace.successor(pos))
        elif isinstance(node, And):
            value = holds(node.left, pos) and holds(node.right, pos)
        elif isinstance(node, Or):
            value = holds(node.left, pos) or holds(node.right, pos)
        elif isinstance(node, Implies):
            value = (not holds(node.left, pos)) or holds(node.right, pos)
        elif isinstance(node, Iff):
            value = holds(node.left, pos) == holds(node.right, pos)
        elif isinstance(node, Until):
            value = False
            current = pos
            for _ in range(horizon):
                if holds(node.right, current):
                    value = True
                    break
                if not holds(node.left, current):
                    value = False
                    break
                current = trace.successor(current)
        else:
            raise TypeError(f"unexpected node after core rewrite: {node!r}")
        memo[key] = value
        return value

    return holds(core, position)
