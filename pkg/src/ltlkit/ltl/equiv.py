"""Bounded semantic comparison of two formulas.

Enumerates every lasso trace over the union alphabet up to a prefix/loop
length bound and compares the formulas at position 0.  A bounded sweep can
prove difference (the first differing trace is returned as a witness) but
never full equivalence, so the passing status is explicit about the bound.

Enumeration order is fixed so results and witnesses are reproducible:
prefix length ascending, then loop length ascending, then step contents by
subset bitmask over the sorted alphabet with later positions varying
fastest; the empty step comes first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ast import Formula, atoms
from .printer import canonical
from .semantics import evaluate
from .trace import LassoTrace

ALPHABET_LIMIT = 6

STATUS_EQUIVALENT = "equivalent-up-to-bound"
STATUS_DISTINGUISHED = "distinguished"


class AlphabetTooLargeError(ValueError):
    """Raised instead of silently attempting an infeasible enumeration."""

    def __init__(self, size: int):
        self.size = size
        super().__init__(
            f"alphabet has {size} atoms; bounded comparison is capped at "
            f"{ALPHABET_LIMIT}"
        )


@dataclass(frozen=True)
class Bound:
    max_prefix: int = 3
    max_loop: int = 3

    def __post_init__(self) -> None:
        if self.max_prefix < 0:
            raise ValueError("max_prefix must be >= 0")
        if self.max_loop < 1:
            raise ValueError("max_loop must be >= 1")


@dataclass(frozen=True)
class EquivResult:
    equivalent: bool
    status: str
    bound: Bound
    alphabet: tuple[str, ...]
    traces_checked: int
    witness: LassoTrace | None = None
    witness_values: tuple[bool, bool] | None = None
    lhs: str = field(default="")
    rhs: str = field(default="")


def _step_sets(alphabet: tuple[str, ...]) -> list[frozenset[str]]:
    sets = []
    for mask in range(1 << len(alphabet)):
        sets.append(
            frozenset(
                name for bit, name in enumerate(alphabet) if mask >> bit & 1
            )
        )
    return sets


def enumerate_traces(alphabet: tuple[str, ...], bound: Bound):
    """Yield every lasso over the alphabet within the bound, in fixed order."""
    step_sets = _step_sets(alphabet)
    for prefix_len in range(bound.max_prefix + 1):
        for loop_len in range(1, bound.max_loop + 1):
            total = prefix_len + loop_len
            for steps in itertools.product(step_sets, repeat=total):
                yield LassoTrace(
                    alphabet=alphabet,
                    prefix=steps[:prefix_len],
                    loop=steps[prefix_len:],
                )


def check_equivalence(
    first: Formula,
    second: Formula,
    bound: Bound = Bound(),
    alphabet: tuple[str, ...] | None = None,
) -> EquivResult:
    """Compare two formulas over all lassos within the bound.

    The alphabet defaults to the sorted union of both formulas' atoms; a
    formula pair with no atoms is compared over a single dummy trace shape
    (the empty alphabet still admits stuttering lassos).
    """
    if alphabet is None:
        alphabet = tuple(sorted(atoms(first) | atoms(second)))
    else:
        alphabet = tuple(alphabet)
    if len(alphabet) > ALPHABET_LIMIT:
        raise AlphabetTooLargeError(len(alphabet))
    checked = 0
    for trace in enumerate_traces(alphabet, bound):
        checked += 1
        left_value = evaluate(first, trace)
        right_value = evaluate(second, trace)
        if left_value != right_value:
            return EquivResult(
                equivalent=False,
                status=STATUS_DISTINGUISHED,
                bound=bound,
                alphabet=alphabet,
                traces_checked=checked,
                witness=trace,
                witness_values=(left_value, right_value),
                lhs=canonical(first),
                rhs=canonical(second),
            )
    return EquivResult(
        equivalent=True,
        status=STATUS_EQUIVALENT,
        bound=bound,
        alphabet=alphabet,
        traces_checked=checked,
        lhs=canonical(first),
        rhs=canonical(second),
    )
