"""Concrete-syntax parser for LTL formulas.

Accepted syntax:

    unary:    ! X F G            (tightest)
    binary:   U W R              (right-associative)
              & (also &&)
              | (also ||)
              ->                 (right-associative)
              <->                (loosest, right-associative)
    atoms:    [a-z_][a-z0-9_]*
    consts:   true false 1 0
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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


class ParseError(ValueError):
    """Syntax error carrying the offending position and the expected tokens."""

    def __init__(self, message: str, position: int, expected: frozenset[str]):
        self.position = position
        self.expected = expected
        hint = ", ".join(sorted(expected))
        super().__init__(f"{message} at position {position} (expected one of: {hint})")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


_TOKEN_SPEC = [
    ("SKIP", r"[ \t\r\n]+"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("IFF", r"<->"),
    ("IMPLIES", r"->"),
    ("AND", r"&&|&"),
    ("OR", r"\|\||\|"),
    ("NOT", r"!"),
    ("NEXT", r"X"),
    ("EVENTUALLY", r"F"),
    ("ALWAYS", r"G"),
    ("UNTIL", r"U"),
    ("WEAKUNTIL", r"W"),
    ("RELEASE", r"R"),
    ("TRUE", r"true\b|1"),
    ("FALSE", r"false\b|0"),
    ("ATOM", r"[a-z_][a-z0-9_]*"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))

BINARY_TOKEN_KINDS = frozenset({"AND", "OR", "IMPLIES", "IFF", "UNTIL", "WEAKUNTIL", "RELEASE"})

_STARTERS = frozenset({"atom", "constant", "'('", "'!'", "'X'", "'F'", "'G'"})


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ParseError(
                f"unexpected character {text[position]!r}", position, _STARTERS
            )
        if match.lastgroup != "SKIP":
            tokens.append(Token(match.lastgroup or "", match.group(), position))
        position = match.end()
    tokens.append(Token("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, expected: frozenset[str]) -> ParseError:
        token = self.peek()
        what = "end of input" if token.kind == "EOF" else repr(token.text)
        return ParseError(f"unexpected {what}", token.position, expected)

    # Precedence climbing, loosest level first.

    def parse_iff(self) -> Formula:
        left = self.parse_implies()
        if self.peek().kind == "IFF":
            self.advance()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek().kind == "IMPLIES":
            self.advance()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek().kind == "OR":
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_until()
        while self.peek().kind == "AND":
            self.advance()
            left = And(left, self.parse_until())
        return left

    def parse_until(self) -> Formula:
        left = self.parse_unary()
        kind = self.peek().kind
        if kind in ("UNTIL", "WEAKUNTIL", "RELEASE"):
            self.advance()
            right = self.parse_until()
            node = {"UNTIL": Until, "WEAKUNTIL": WeakUntil, "RELEASE": Release}[kind]
            return node(left, right)
        return left

    def parse_unary(self) -> Formula:
        kind = self.peek().kind
        if kind == "NOT":
            self.advance()
            return Not(self.parse_unary())
        if kind == "NEXT":
            self.advance()
            return Next(self.parse_unary())
        if kind == "EVENTUALLY":
            self.advance()
            return Eventually(self.parse_unary())
        if kind == "ALWAYS":
            self.advance()
            return Always(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        token = self.peek()
        if token.kind == "ATOM":
            self.advance()
            return Atom(token.text)
        if token.kind == "TRUE":
            self.advance()
            return TrueBool()
        if token.kind == "FALSE":
            self.advance()
            return FalseBool()
        if token.kind == "LPAREN":
            self.advance()
            inner = self.parse_iff()
            if self.peek().kind != "RPAREN":
                raise self.fail(frozenset({"')'"}))
            self.advance()
            return inner
        raise self.fail(_STARTERS)


def parse(text: str) -> Formula:
    """Parse concrete LTL syntax into a formula tree.

    Raises ParseError on malformed input; empty input is an error.
    """
    tokens = tokenize(text)
    if tokens[0].kind == "EOF":
        raise ParseError("empty input", 0, _STARTERS)
    parser = _Parser(tokens)
    formula = parser.parse_iff()
    if parser.peek().kind != "EOF":
        raise parser.fail(frozenset({"end of input", "binary operator"}))
    return formula
