"""Certified computations around the L2 discrepancy of irrational lattices.

Continued fractions (:mod:`lowdisc.contfrac`), Diophantine sums
(:mod:`lowdisc.diophantine`), generalized Dedekind sums
(:mod:`lowdisc.dedekind`) and the Davenport point set
(:mod:`lowdisc.discrepancy`), all on top of exact rationals and certified
enclosures (:mod:`lowdisc.exactnum`).
"""

from .contfrac import CFExpansion, ConvergentTable, cf_expand, convergent_table, locate_index, qnorm_bounds
from .dedekind import barkan_estimate, bernoulli_poly, dedekind_fast, dedekind_sum, theorem2_error
from .diophantine import beck_deviation, block_sum, c_constant, dsum, norm_dist, theorem3_estimate
from .discrepancy import (
    PointSet2D,
    corollary4_main,
    davenport_set,
    discrepancy_report,
    l2sq_exact,
    slope_fit,
    theorem1_main,
)
from .errors import DomainError, LowdiscError, NeedsMoreTermsError, PrecisionExhaustedError
from .exactnum import E, PHI, SQRT2, SQRT3, Enclosure, parse_spec, refine

__version__ = "0.1.0"

__all__ = [
    "CFExpansion", "ConvergentTable", "cf_expand", "convergent_table", "locate_index", "qnorm_bounds",
    "barkan_estimate", "bernoulli_poly", "dedekind_fast", "dedekind_sum", "theorem2_error",
    "beck_deviation", "block_sum", "c_constant", "dsum", "norm_dist", "theorem3_estimate",
    "PointSet2D", "corollary4_main", "davenport_set", "discrepancy_report", "l2sq_exact",
    "slope_fit", "theorem1_main",
    "DomainError", "LowdiscError", "NeedsMoreTermsError", "PrecisionExhaustedError",
    "E", "PHI", "SQRT2", "SQRT3", "Enclosure", "parse_spec", "refine",
]
