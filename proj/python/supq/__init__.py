"""Truncated-domain mass ratios and minimal-level tables for SU(p,q)."""

from ._core import (
    check_norm_gap,
    find_n0,
    max_R,
    nu,
    ratio,
    run_suite,
    table,
    truncated_poincare,
)

__all__ = [
    "check_norm_gap",
    "find_n0",
    "max_R",
    "nu",
    "ratio",
    "run_suite",
    "table",
    "truncated_poincare",
]
