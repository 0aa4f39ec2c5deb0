"""LTL core: syntax trees, parsing, printing, trace semantics, comparison."""

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
    children,
    node_count,
    walk,
)
from .equiv import (
    ALPHABET_LIMIT,
    STATUS_DISTINGUISHED,
    STATUS_EQUIVALENT,
    AlphabetTooLargeError,
    Bound,
    EquivResult,
    check_equivalence,
    enumerate_traces,
)
from .parser import ParseError, parse, tokenize
from .printer import canonical, format_formula
from .semantics import UnknownAtomError, evaluate, truth_table
from .trace import LassoTrace, make_trace, trace_from_json, trace_to_json

__all__ = [
    "ALPHABET_LIMIT",
    "STATUS_DISTINGUISHED",
    "STATUS_EQUIVALENT",
    "AlphabetTooLargeError",
    "Always",
    "And",
    "Atom",
    "Bound",
    "EquivResult",
    "Eventually",
    "FalseBool",
    "Formula",
    "Iff",
    "Implies",
    "LassoTrace",
    "Next",
    "Not",
    "Or",
    "ParseError",
    "Release",
    "TrueBool",
    "UnknownAtomError",
    "Until",
    "WeakUntil",
    "atoms",
    "canonical",
    "check_equivalence",
    "children",
    "enumerate_traces",
    "evaluate",
    "format_formula",
    "make_trace",
    "node_count",
    "parse",
    "tokenize",
    "trace_from_json",
    "trace_to_json",
    "truth_table",
    "walk",
]
