"""
Empirical reachable sets: sampling, steering, ball coverage and control
variations.
"""

from .growth import GrowthReport, ball_coverage, calibrate_growth_constant, growth_rate_test
from .sampler import ReachSample, SamplingMode, axis_directions, sample_reachable, unit_directions
from .steering import SteerOptions, SteerResult, steer_to
from .variation import VariationReport, lemma_consistency, order_scan, variation_check

__all__ = [
    "GrowthReport",
    "ball_coverage",
    "calibrate_growth_constant",
    "growth_rate_test",
    "ReachSample",
    "SamplingMode",
    "axis_directions",
    "sample_reachable",
    "unit_directions",
    "SteerOptions",
    "SteerResult",
    "steer_to",
    "VariationReport",
    "lemma_consistency",
    "order_scan",
    "variation_check",
]
