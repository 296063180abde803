"""dilatrix: numerical certification of dilation inequalities for s-concave measures."""

from dilatrix.intervals import (
    Interval,
    IntervalSet,
    alpha_1d,
    dilate_exact,
    dilate_grid_oracle,
    measure_and_intersection,
    normalize,
    symmetric_difference_measure,
)
from dilatrix.reports import CheckReport, summarize

__all__ = [
    "Interval",
    "IntervalSet",
    "CheckReport",
    "alpha_1d",
    "dilate_exact",
    "dilate_grid_oracle",
    "measure_and_intersection",
    "normalize",
    "summarize",
    "symmetric_difference_measure",
]

__version__ = "0.1.0"
