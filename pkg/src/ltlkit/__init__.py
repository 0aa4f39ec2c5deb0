"""Interactive workbench for turning natural language into LTL formulas.

The package bundles an LTL core (parser, printer, lasso-trace semantics,
bounded equivalence checking), a few-shot prompting scheme with pluggable
completion backends, sub-translation aggregation with voting confidence,
an editable translation session, an HTTP gateway, and an evaluation
harness over a natural-language benchmark.
"""

__version__ = "0.1.0"
