"""
Chronological calculus: truncated flow expansions, numerical flows and their
discrepancy, seminorm estimates.
"""

from .expansion import FlowPolynomial, chrono_power, exp_trunc_schedule
from .integrator import FlowResult, flow_numeric
from .oracle import picard_direct_oracle
from .picard import PicardFitReport, picard_error, picard_fit
from .seminorm import SeminormSpec, seminorm

__all__ = [
    "FlowPolynomial",
    "chrono_power",
    "exp_trunc_schedule",
    "FlowResult",
    "flow_numeric",
    "picard_direct_oracle",
    "PicardFitReport",
    "picard_error",
    "picard_fit",
    "SeminormSpec",
    "seminorm",
]
