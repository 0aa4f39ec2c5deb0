"""Formula-to-text rendering.

Two modes:

* ``minimal`` emits only the parentheses required to round-trip through the
  parser.  This rendering is canonical: two formulas print identically iff
  their trees are equal, so it doubles as a vote key.
* ``full`` wraps every operator node, which is easier to read next to a
  model's raw output.
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
)

# Binding strength, tighter binds higher.  Unary sits above all binaries.
_LEVEL_UNARY = 5
_LEVELS: dict[type, int] = {
    Until: 4,
    WeakUntil: 4,
    Release: 4,
    And: 3,
    Or: 2,
    Implies: 1,
    Iff: 0,
}
# U/W/R and -> and <-> associate to the right; & and | to the left.
_RIGHT_ASSOC = (Until, WeakUntil, Release, Implies, Iff)

_UNARY_SYMBOL = {Not: "!", Next: "X", Eventually: "F", Always: "G"}
_BINARY_SYMBOL = {
    And: "&",
    Or: "|",
    Implies: "->",
    Iff: "<->",
    Until: "U",
    WeakUntil: "W",
    Release: "R",
}


def _level(formula: Formula) -> int:
    kind = type(formula)
    if kind in _UNARY_SYMBOL:
        return _LEVEL_UNARY
    return _LEVELS.get(kind, 6)


def _minimal(formula: Formula) -> str:
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, TrueBool):
        return "true"
    if isinstance(formula, FalseBool):
        return "false"
    kind = type(formula)
    if kind in _UNARY_SYMBOL:
        child = formula.operand  # type: ignore[attr-defined]
        rendered = _minimal(child)
        if _level(child) < _LEVEL_UNARY:
            rendered = f"({rendered})"
        symbol = _UNARY_SYMBOL[kind]
        if symbol == "!" or rendered.startswith("("):
            return symbol + rendered
        return f"{symbol} {rendered}"
    level = _LEVELS[kind]
    left, right = formula.left, formula.right  # type: ignore[attr-defined]
    if kind in _RIGHT_ASSOC:
        left_parens = _level(left) <= level
        right_parens = _level(right) < level
    else:
        left_parens = _level(left) < level
        right_parens = _level(right) <= level
    left_text = _minimal(left)
    right_text = _minimal(right)
    if left_parens:
        left_text = f"({left_text})"
    if right_parens:
        right_text = f"({right_text})"
    return f"{left_text} {_BINARY_SYMBOL[kind]} {right_text}"


def _full(formula: Formula) -> str:
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, TrueBool):
        return "true"
    if isinstance(formula, FalseBool):
        return "false"
    kind = type(formula)
    if kind in _UNARY_SYMBOL:
        child = _full(formula.operand)  # type: ignore[attr-defined]
        return f"({_UNARY_SYMBOL[kind]} {child})"
    left = _full(formula.left)  # type: ignore[attr-defined]
    right = _full(formula.right)  # type: ignore[attr-defined]
    return f"({left} {_BINARY_SYMBOL[kind]} {right})"


def format_formula(formula: Formula, parens: str = "minimal") -> str:
    """Render a formula; ``parens`` is ``"minimal"`` or ``"full"``."""
    if parens == "minimal":
        return _minimal(formula)
    if parens == "full":
        return _full(formula)
    raise ValueError(f"unknown parenthesization mode: {parens!r}")


def canonical(formula: Formula) -> str:
    """The canonical text form used to compare and tally candidate formulas."""
    return _minimal(formula)
