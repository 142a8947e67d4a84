"""Obstruction probes for extending free surface actions to 3-manifolds.

Thin re-export of the compiled module; see the README for the group file
grammar and the CLI.
"""

from ._pcprobe import (
    GuardExceeded,
    PcParseError,
    PcPresentation,
    bogomolov,
    collect,
    commutator,
    count_involutions,
    covering_genus,
    element_order,
    genus2_subgroup,
    h2_bar_oracle,
    inverse,
    is_consistent,
    multiply,
    parse,
    parse_corpus,
    schur_multiplier,
    serialize,
    toral_subgroup,
    verdict,
)

__all__ = [
    "GuardExceeded",
    "PcParseError",
    "PcPresentation",
    "bogomolov",
    "collect",
    "commutator",
    "count_involutions",
    "covering_genus",
    "element_order",
    "genus2_subgroup",
    "h2_bar_oracle",
    "inverse",
    "is_consistent",
    "multiply",
    "parse",
    "parse_corpus",
    "schur_multiplier",
    "serialize",
    "toral_subgroup",
    "verdict",
]
