"""Exact discrepancy of index-transformed low-discrepancy sequences."""

from ._core import (
    LowdiscError,
    apply_transform,
    discrepancy,
    distribution,
    generate,
    hellekalek_bound,
    multiplicity,
    radical_inverse,
    run_cli,
    sum_of_digits,
    weyl_sum,
)

__all__ = [
    "LowdiscError",
    "apply_transform",
    "discrepancy",
    "distribution",
    "generate",
    "hellekalek_bound",
    "multiplicity",
    "radical_inverse",
    "run_cli",
    "sum_of_digits",
    "weyl_sum",
]
