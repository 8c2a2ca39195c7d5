"""
Ball-coverage tests of the growth rate condition.

A system satisfies the growth rate condition of order N at x0 when the
closed ball of radius C * t^N about x0 lies in R(< t, x0) for all small t.
Numerically the ball is probed along a fixed set of unit directions: the
target x0 + radius * d counts as covered when a sampled endpoint, or failing
that a steering run, lands within delta * radius of it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from ..chrono.compiled import compile_system
from ..core.errors import InputError
from ..core.system import ControlSystem, require_valid
from ..utils.parallel import derive_seed, ordered_map
from .sampler import ReachSample, SamplingMode, sample_reachable, unit_directions
from .steering import SteerOptions, steer_to

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.05
DEFAULT_COVERAGE_THRESHOLD = 0.95


@dataclass
class CoverageResult:
    """Fraction of probe targets within delta * radius of some endpoint."""

    radius: float
    coverage: float
    covered: List[bool]
    distances: List[float]

    @property
    def uncovered(self) -> List[int]:
        return [i for i, ok in enumerate(self.covered) if not ok]


def ball_coverage(
    sample: ReachSample,
    x0: Sequence[Any],
    radius: float,
    directions: Union[int, np.ndarray],
    delta: float = DEFAULT_DELTA,
    seed: int = 0,
) -> CoverageResult:
    """
    Coverage of the sphere of ``radius`` about ``x0`` by ``sample``.

    ``directions`` is either an explicit array of unit vectors or a count
    passed to ``unit_directions``. Radius 0 is always fully covered.
    """
    if len(sample) == 0:
        raise InputError("Cannot measure coverage of an empty sample")
    if radius < 0:
        raise InputError(f"Radius must be non-negative, got {radius}")
    if delta <= 0:
        raise InputError(f"Coverage tolerance delta must be positive, got {delta}")
    center = np.array([float(v) for v in x0])
    if isinstance(directions, int):
        dirs = unit_directions(center.size, directions, seed)
    else:
        dirs = np.asarray(directions, dtype=float)
    if radius == 0:
        return CoverageResult(0.0, 1.0, [True] * len(dirs), [0.0] * len(dirs))
    targets = center[None, :] + radius * dirs
    distances, _ = cKDTree(sample.endpoints).query(targets)
    covered = [bool(d <= delta * radius) for d in distances]
    return CoverageResult(
        radius=float(radius),
        coverage=sum(covered) / len(covered),
        covered=covered,
        distances=[float(d) for d in distances],
    )


@dataclass
class TimeCoverage:
    t: float
    radius: float
    sampled_coverage: float
    coverage: float
    steered: int = 0
    uncovered: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "radius": self.radius,
            "sampled_coverage": self.sampled_coverage,
            "coverage": self.coverage,
            "steered": self.steered,
            "uncovered": list(self.uncovered),
        }


@dataclass
class GrowthReport:
    """Per-t coverage of the ball of radius C t^N."""

    order: int
    constant: float
    directions: int
    delta: float
    threshold: float
    horizon: Optional[float] = None
    rows: List[TimeCoverage] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.coverage >= self.threshold for row in self.rows)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "not found under budget"

    def coverage_at(self, t: float) -> float:
        for row in self.rows:
            if row.t == t:
                return row.coverage
        raise KeyError(t)

    def csv_rows(self) -> List[List[Any]]:
        return [[row.t, row.radius, row.coverage] for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.order,
            "C": self.constant,
            "directions": self.directions,
            "delta": self.delta,
            "threshold": self.threshold,
            "T": self.horizon,
            "passed": self.passed,
            "verdict": self.verdict,
            "rows": [row.to_dict() for row in self.rows],
        }


def growth_rate_test(
    sys: ControlSystem,
    x0: Sequence[Any],
    N: int,
    C: float,
    times: Sequence[float],
    seed: int,
    samples: int = 2000,
    mode: Union[SamplingMode, str] = SamplingMode.BANG_BANG,
    directions: int = 64,
    delta: float = DEFAULT_DELTA,
    threshold: float = DEFAULT_COVERAGE_THRESHOLD,
    steer: Optional[SteerOptions] = None,
    refine: bool = True,
    jobs: int = 1,
    horizon: Optional[float] = None,
) -> GrowthReport:
    """
    Ball coverage at radius C * t^N for every t, with steering refinement of
    the directions the sample misses.

    With a ``horizon`` T every t must lie in (0, T].
    """
    require_valid(sys)
    if N < 1:
        raise InputError(f"Order N must be at least 1, got {N}")
    if C < 0:
        raise InputError(f"Constant C must be non-negative, got {C}")
    if not times:
        raise InputError("At least one time is required")
    for t in times:
        if t <= 0:
            raise InputError(f"Times must be positive, got {t}")
        if horizon is not None and t > horizon:
            raise InputError(f"Time t={t} exceeds the horizon T={horizon}")
    steer = steer or SteerOptions()
    compiled = compile_system(sys)
    dirs = unit_directions(sys.dim, directions, seed)
    center = np.array([float(v) for v in x0])
    report = GrowthReport(
        order=N,
        constant=float(C),
        directions=len(dirs),
        delta=delta,
        threshold=threshold,
        horizon=None if horizon is None else float(horizon),
    )

    for index, t in enumerate(times):
        radius = C * t**N
        if radius == 0:
            report.rows.append(TimeCoverage(float(t), 0.0, 1.0, 1.0))
            continue
        sample = sample_reachable(
            sys,
            center,
            t,
            samples,
            steer.segments,
            derive_seed(seed, index),
            mode=mode,
            duration_scale=steer.duration_scale,
            step=steer.step,
            blowup_cap=steer.blowup_cap,
            jobs=jobs,
            compiled=compiled,
        )
        result = ball_coverage(sample, center, radius, dirs, delta)
        covered = list(result.covered)
        missing = result.uncovered
        if refine and missing:

            def refine_one(direction: int) -> bool:
                target = center + radius * dirs[direction]
                run = steer_to(
                    sys,
                    center,
                    target,
                    t,
                    derive_seed(seed, index, direction),
                    options=steer,
                    warm=sample,
                    compiled=compiled,
                )
                return run.distance <= delta * radius

            for direction, ok in zip(missing, ordered_map(refine_one, missing, jobs)):
                covered[direction] = ok
        row = TimeCoverage(
            t=float(t),
            radius=float(radius),
            sampled_coverage=result.coverage,
            coverage=sum(covered) / len(covered),
            steered=len(missing) if refine else 0,
            uncovered=[i for i, ok in enumerate(covered) if not ok],
        )
        logger.info(
            "%s N=%d t=%g: coverage %.3f (sampled %.3f)",
            sys.name,
            N,
            t,
            row.coverage,
            row.sampled_coverage,
        )
        report.rows.append(row)
    return report


@dataclass
class CalibrationReport:
    """Growth constant from the worst directional support of a brute-force sample."""

    order: int
    t: float
    constant: float
    min_ratio: float
    safety: float
    samples: int
    ratios: List[float] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.order,
            "t": self.t,
            "C": self.constant,
            "min_ratio": self.min_ratio,
            "safety": self.safety,
            "samples": self.samples,
            "ratios": list(self.ratios),
            "diagnostics": list(self.diagnostics),
        }


def calibrate_growth_constant(
    sys: ControlSystem,
    x0: Sequence[Any],
    N: int,
    t: float,
    samples: int,
    p: int,
    seed: int,
    directions: int = 64,
    safety: float = 0.5,
    mode: Union[SamplingMode, str] = SamplingMode.BANG_BANG,
    jobs: int = 1,
) -> CalibrationReport:
    """
    C = safety * min_d max_y <y - x0, d> / t^N over a bang-bang sample.

    A non-positive minimum means some direction is never entered; C is then 0.
    """
    if N < 1:
        raise InputError(f"Order N must be at least 1, got {N}")
    sample = sample_reachable(sys, x0, t, samples, p, seed, mode=mode, jobs=jobs)
    dirs = unit_directions(sys.dim, directions, seed)
    offsets = sample.endpoints - sample.basepoint[None, :]
    support = (offsets @ dirs.T).max(axis=0)
    ratios = [float(v) for v in support / t**N]
    min_ratio = min(ratios)
    report = CalibrationReport(
        order=N,
        t=float(t),
        constant=safety * max(min_ratio, 0.0),
        min_ratio=min_ratio,
        safety=safety,
        samples=samples,
        ratios=ratios,
    )
    if min_ratio <= 0:
        report.diagnostics.append("some direction has non-positive support; C set to 0")
    logger.info("Calibrated C=%.6g for %s at N=%d, t=%g", report.constant, sys.name, N, t)
    return report
