"""Boundary-crossing probabilities of Brownian motion with jumps."""

from ._bcp import (
    SeriesNotConverged,
    anderson_chi,
    anderson_theta,
    bridge_upcross_prob,
    estimate,
    linear_noncross_prob,
    poisson_tail_bound,
    table,
    truncation_level,
    two_sided_segment_factor,
    two_sided_tail_prob,
    weights,
)

__all__ = [
    "SeriesNotConverged",
    "anderson_chi",
    "anderson_theta",
    "bridge_upcross_prob",
    "estimate",
    "linear_noncross_prob",
    "poisson_tail_bound",
    "table",
    "truncation_level",
    "two_sided_segment_factor",
    "two_sided_tail_prob",
    "weights",
]
