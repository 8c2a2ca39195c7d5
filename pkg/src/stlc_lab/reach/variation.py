"""
Control variations: is x0 + c t^k v reachable in time < t, up to O(t^{k+1})?

Failure to steer is evidence, not proof. Negative verdicts are reported as
"not found under budget" and only piecewise-constant families with a fixed
number of switches are searched.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..chrono.compiled import compile_system
from ..core.errors import InputError
from ..core.system import ControlSystem, require_valid
from ..utils.parallel import derive_seed, ordered_map
from .sampler import direction_label, random_directions
from .steering import SteerOptions, steer_to

logger = logging.getLogger(__name__)

DEFAULT_RHO = 0.1
DEFAULT_SLOPE_MARGIN = 0.5
DEFAULT_FLOOR = 1e-3
DEFAULT_SCALE = 0.05


@dataclass
class VariationReport:
    """Steering residuals toward x0 + c t^k v on a grid of t."""

    direction: List[float]
    order: int
    scale: float
    times: List[float]
    target_distances: List[float]
    residuals: List[float]
    rho: float
    slope_margin: float
    slope: Optional[float] = None
    slope_points: int = 0
    within_tolerance: bool = False
    slope_ok: bool = False
    schedules: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.within_tolerance and self.slope_ok

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "not found under budget"

    @property
    def label(self) -> str:
        return direction_label(self.direction)

    def csv_rows(self) -> List[List[Any]]:
        return [
            [t, d, r] for t, d, r in zip(self.times, self.target_distances, self.residuals)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "direction": list(self.direction),
            "k": self.order,
            "c": self.scale,
            "rho": self.rho,
            "slope_margin": self.slope_margin,
            "slope": self.slope,
            "slope_points": self.slope_points,
            "within_tolerance": self.within_tolerance,
            "slope_ok": self.slope_ok,
            "passed": self.passed,
            "verdict": self.verdict,
            "rows": [
                {"t": t, "target_dist": d, "residual": r, "schedule": s}
                for t, d, r, s in zip(
                    self.times, self.target_distances, self.residuals, self.schedules
                )
            ],
        }


def _unit(v: Sequence[float]) -> np.ndarray:
    direction = np.array([float(x) for x in v])
    norm = float(np.linalg.norm(direction))
    if not math.isclose(norm, 1.0, rel_tol=1e-9, abs_tol=1e-9):
        raise InputError(f"Direction must be a unit vector, |v| = {norm}")
    return direction


def variation_check(
    sys: ControlSystem,
    x0: Sequence[Any],
    v: Sequence[float],
    k: int,
    c: float,
    times: Sequence[float],
    seed: int,
    rho: float = DEFAULT_RHO,
    slope_margin: float = DEFAULT_SLOPE_MARGIN,
    floor: float = DEFAULT_FLOOR,
    steer: Optional[SteerOptions] = None,
    jobs: int = 1,
) -> VariationReport:
    """
    Steer to x0 + c t^k v for every t and judge the residuals.

    Passes when every residual is at most rho * c * t^k and the log-log
    slope of residual against t is at least k + slope_margin. Residuals below
    floor * c * t^k count as exact hits and are left out of the slope fit;
    with fewer than two residuals left the slope criterion holds.
    """
    require_valid(sys)
    direction = _unit(v)
    if direction.size != sys.dim:
        raise InputError(f"Direction has {direction.size} coordinates, expected {sys.dim}")
    if k < 1:
        raise InputError(f"Variation order must be at least 1, got {k}")
    if c <= 0:
        raise InputError(f"Scale c must be positive, got {c}")
    if not times:
        raise InputError("At least one time is required")
    steer = steer or SteerOptions()
    compiled = compile_system(sys)
    center = np.array([float(x) for x in x0])

    def run(index: int):
        t = times[index]
        target = center + c * t**k * direction
        return steer_to(
            sys, center, target, t, derive_seed(seed, index), options=steer, compiled=compiled
        )

    results = ordered_map(run, list(range(len(times))), jobs)
    radii = [c * t**k for t in times]
    residuals = [r.distance for r in results]
    report = VariationReport(
        direction=[float(x) for x in direction],
        order=k,
        scale=float(c),
        times=[float(t) for t in times],
        target_distances=radii,
        residuals=residuals,
        rho=rho,
        slope_margin=slope_margin,
        schedules=[r.schedule.to_literal() for r in results],
    )
    report.within_tolerance = all(r <= rho * d for r, d in zip(residuals, radii))

    fit = [(t, r) for t, r, d in zip(times, residuals, radii) if r > floor * d]
    report.slope_points = len(fit)
    if len({t for t, _ in fit}) >= 2:
        slope, _ = np.polyfit(np.log([t for t, _ in fit]), np.log([r for _, r in fit]), 1)
        report.slope = float(slope)
        report.slope_ok = report.slope >= k + slope_margin
    else:
        report.slope_ok = True
    logger.info(
        "%s v=%s k=%d: %s (max residual ratio %.3g)",
        sys.name,
        report.label,
        k,
        report.verdict,
        max(r / d for r, d in zip(residuals, radii)),
    )
    return report


@dataclass
class OrderScanResult:
    """Smallest k at which a variation along ``direction`` was found."""

    direction: List[float]
    order: Optional[int]
    k_max: int
    reports: List[VariationReport] = field(default_factory=list)

    @property
    def label(self) -> str:
        return direction_label(self.direction)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "direction": list(self.direction),
            "label": self.label,
            "order": self.order,
            "k_max": self.k_max,
            "verdict": "found" if self.order is not None else "not found under budget",
            "reports": [r.to_dict() for r in self.reports],
        }


def order_scan(
    sys: ControlSystem,
    x0: Sequence[Any],
    v: Sequence[float],
    k_max: int,
    times: Sequence[float],
    seed: int,
    c: float = DEFAULT_SCALE,
    rho: float = DEFAULT_RHO,
    slope_margin: float = DEFAULT_SLOPE_MARGIN,
    floor: float = DEFAULT_FLOOR,
    steer: Optional[SteerOptions] = None,
    jobs: int = 1,
) -> OrderScanResult:
    """variation_check for k = 1..k_max; stops at the first pass."""
    if k_max < 1:
        raise InputError(f"k_max must be at least 1, got {k_max}")
    result = OrderScanResult(direction=[float(x) for x in v], order=None, k_max=k_max)
    for k in range(1, k_max + 1):
        report = variation_check(
            sys,
            x0,
            v,
            k,
            c,
            times,
            derive_seed(seed, k),
            rho=rho,
            slope_margin=slope_margin,
            floor=floor,
            steer=steer,
            jobs=jobs,
        )
        result.reports.append(report)
        if report.passed:
            result.order = k
            break
    return result


@dataclass
class LemmaConsistencyReport:
    """Variations of order N with scale C along seeded random directions."""

    order: int
    constant: float
    reports: List[VariationReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def failures(self) -> List[str]:
        return [r.label for r in self.reports if not r.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.order,
            "C": self.constant,
            "passed": self.passed,
            "failures": self.failures,
            "reports": [r.to_dict() for r in self.reports],
        }


def lemma_consistency(
    sys: ControlSystem,
    x0: Sequence[Any],
    N: int,
    C: float,
    times: Sequence[float],
    seed: int,
    directions: int = 20,
    rho: float = DEFAULT_RHO,
    slope_margin: float = DEFAULT_SLOPE_MARGIN,
    floor: float = DEFAULT_FLOOR,
    steer: Optional[SteerOptions] = None,
    jobs: int = 1,
) -> LemmaConsistencyReport:
    """
    A system covering balls of radius C t^N must also admit the curves
    x0 + C t^N v; check this along ``directions`` seeded unit vectors.
    """
    report = LemmaConsistencyReport(order=N, constant=float(C))
    for index, v in enumerate(random_directions(sys.dim, directions, seed)):
        report.reports.append(
            variation_check(
                sys,
                x0,
                v,
                N,
                C,
                times,
                derive_seed(seed, index),
                rho=rho,
                slope_margin=slope_margin,
                floor=floor,
                steer=steer,
                jobs=jobs,
            )
        )
    return report
