"""Printer coverage: minimal and full modes, canonicality, round-trips."""

import pytest
from hypothesis import given, settings

from formula_gen import formulas
from ltlkit.ltl import (
    Always,
    And,
    Atom,
    FalseBool,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    TrueBool,
    Until,
    canonical,
    format_formula,
    parse,
)

A, B = Atom("a"), Atom("b")


def test_minimal_mode_examples():
    assert canonical(Always(Not(And(Atom("g0"), Atom("g1"))))) == "G !(g0 & g1)"
    assert canonical(Or(Until(A, B), Always(A))) == "a U b | G a"
    assert canonical(Always(Until(A, B))) == "G(a U b)"
    assert canonical(Until(A, Or(B, Always(A)))) == "a U (b | G a)"
    assert canonical(Not(Not(A))) == "!!a"
    assert canonical(Next(Next(B))) == "X X b"
    assert canonical(TrueBool()) == "true"
    assert canonical(FalseBool()) == "false"


def test_minimal_mode_keeps_tree_shape():
    # Same-level trees that differ in grouping must print differently.
    left_nested = And(And(A, B), Atom("c"))
    right_nested = And(A, And(B, Atom("c")))
    assert canonical(left_nested) == "a & b & c"
    assert canonical(right_nested) == "a & (b & c)"

    chain = Implies(A, Implies(B, Atom("c")))
    grouped = Implies(Implies(A, B), Atom("c"))
    assert canonical(chain) == "a -> b -> c"
    assert canonical(grouped) == "(a -> b) -> c"

    assert canonical(Until(Until(A, B), Atom("c"))) == "(a U b) U c"
    assert canonical(Until(A, Until(B, Atom("c")))) == "a U b U c"


def test_full_mode_examples():
    assert format_formula(Or(Until(A, B), Always(A)), "full") == "((a U b) | (G a))"
    assert format_formula(Not(A), "full") == "(! a)"
    assert format_formula(A, "full") == "a"
    assert (
        format_formula(Always(Implies(A, Next(Next(B)))), "full")
        == "(G (a -> (X (X b))))"
    )


def test_equal_spellings_share_canonical_text():
    assert canonical(parse("G(a)")) == canonical(parse("G a")) == "G a"
    assert canonical(parse("a && b")) == canonical(parse("a & b"))
    assert canonical(parse("((a)) | (b)")) == canonical(parse("a | b"))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        format_formula(A, "fancy")


@settings(max_examples=300)
@given(formulas())
def test_minimal_round_trips(formula):
    assert parse(format_formula(formula, "minimal")) == formula


@settings(max_examples=300)
@given(formulas())
def test_full_round_trips(formula):
    assert parse(format_formula(formula, "full")) == formula


@settings(max_examples=200)
@given(formulas(), formulas())
def test_canonical_text_separates_distinct_trees(first, second):
    if first != second:
        assert canonical(first) != canonical(second)
    else:
        assert canonical(first) == canonical(second)


def test_iff_is_right_associative_in_both_directions():
    chain = Iff(A, Iff(B, Atom("c")))
    assert canonical(chain) == "a <-> b <-> c"
    assert parse(canonical(chain)) == chain
