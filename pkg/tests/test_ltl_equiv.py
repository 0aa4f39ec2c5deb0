"""Bounded comparison: fixtures, witnesses, enumeration order, limits."""

import pytest
from hypothesis import given, settings

from formula_gen import formulas
from ltlkit.ltl import (
    ALPHABET_LIMIT,
    STATUS_DISTINGUISHED,
    STATUS_EQUIVALENT,
    AlphabetTooLargeError,
    Bound,
    check_equivalence,
    enumerate_traces,
    evaluate,
    parse,
)


def test_distinguishes_conjunction_from_implication():
    result = check_equivalence(parse("G(a & b)"), parse("G(a -> b)"))
    assert result.status == STATUS_DISTINGUISHED
    assert not result.equivalent
    witness = result.witness
    assert witness is not None
    left = evaluate(parse("G(a & b)"), witness)
    right = evaluate(parse("G(a -> b)"), witness)
    assert left != right
    assert result.witness_values == (left, right)


def test_until_disjunction_rewrites_agree_within_bound():
    first = parse("(a U b) | G a")
    second = parse("a U (b | G a)")
    result = check_equivalence(first, second, Bound(3, 3))
    assert result.status == STATUS_EQUIVALENT
    assert result.equivalent
    assert result.witness is None


def test_reflexivity():
    for text in ["a", "G(a -> F b)", "a U b | G a", "X X c <-> F c"]:
        formula = parse(text)
        result = check_equivalence(formula, formula, Bound(1, 1))
        assert result.equivalent


def test_spelling_variants_are_equivalent():
    result = check_equivalence(parse("G(a)"), parse("G a"), Bound(2, 2))
    assert result.equivalent


def test_trace_counts_are_exhaustive():
    # One atom, bound (1, 1): loops of length 1 with prefix 0 or 1 over two
    # possible steps gives 2 + 4 shapes.
    result = check_equivalence(parse("a"), parse("a"), Bound(1, 1))
    assert result.traces_checked == 6

    # Two atoms, bound (3, 3): sum over prefix 0..3 and loop 1..3 of 4^(p+q).
    expected = sum(4 ** (p + q) for p in range(4) for q in range(1, 4))
    result = check_equivalence(parse("a U b"), parse("a U b"), Bound(3, 3))
    assert result.traces_checked == expected == 7140


def test_enumeration_is_deterministic_and_starts_empty():
    first_pass = list(enumerate_traces(("a",), Bound(1, 1)))
    second_pass = list(enumerate_traces(("a",), Bound(1, 1)))
    assert first_pass == second_pass
    head = first_pass[0]
    assert head.prefix == ()
    assert head.loop == (frozenset(),)


def test_witness_is_earliest_in_enumeration_order():
    result = check_equivalence(parse("a"), parse("!a"))
    # The very first trace (empty loop step) already separates a from !a.
    assert result.traces_checked == 1
    assert result.witness is not None
    assert result.witness.prefix == ()
    assert result.witness.loop == (frozenset(),)


def test_alphabet_defaults_to_union_of_atoms():
    result = check_equivalence(parse("a & b"), parse("c | a"))
    assert result.alphabet == ("a", "b", "c")


def test_explicit_alphabet_override():
    result = check_equivalence(parse("a"), parse("a"), Bound(1, 1), alphabet=("a", "b"))
    assert result.alphabet == ("a", "b")
    assert result.traces_checked == 4 + 16


def test_alphabet_cap_is_enforced():
    atoms = [f"v{i}" for i in range(ALPHABET_LIMIT + 1)]
    big = parse(" & ".join(atoms))
    with pytest.raises(AlphabetTooLargeError):
        check_equivalence(big, big)
    # Exactly at the cap still runs.
    at_cap = parse(" & ".join(atoms[:ALPHABET_LIMIT]))
    result = check_equivalence(at_cap, at_cap, Bound(0, 1))
    assert result.equivalent


def test_no_atom_formulas_compare_over_empty_alphabet():
    result = check_equivalence(parse("true"), parse("!false"))
    assert result.equivalent
    assert result.alphabet == ()
    result = check_equivalence(parse("true"), parse("false"))
    assert not result.equivalent


def test_bound_validation():
    with pytest.raises(ValueError):
        Bound(-1, 1)
    with pytest.raises(ValueError):
        Bound(0, 0)


def test_canonical_strings_attached_to_result():
    result = check_equivalence(parse("G(a)"), parse("G a"), Bound(1, 1))
    assert result.lhs == "G a"
    assert result.rhs == "G a"


@settings(max_examples=60, deadline=None)
@given(formulas(max_leaves=4))
def test_every_formula_is_bounded_equivalent_to_itself(formula):
    assert check_equivalence(formula, formula, Bound(1, 1)).equivalent
