"""
Perturbation experiments: steer under X, replay under Y.

The perturbation map sends a target x to the endpoint of the schedule that
steers X to x, replayed under Y. When X and Y have Nth contact at x0 and X
covers balls of radius C t^N, the replay error should scale like t^{N+1} and
Y should cover balls of radius C t^N / 2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..chrono.compiled import compile_system
from ..chrono.integrator import flow_numeric
from ..core.errors import InputError
from ..core.system import ControlSystem, Schedule
from ..core.taylor import kth_contact
from ..reach.growth import GrowthReport, growth_rate_test
from ..reach.sampler import axis_directions, direction_label
from ..reach.steering import SteerOptions, steer_to
from ..reach.variation import DEFAULT_SCALE, OrderScanResult, order_scan
from ..utils.parallel import derive_seed, ordered_map, task_rng

logger = logging.getLogger(__name__)

DEFAULT_NOISE_FACTOR = 10.0
DEFAULT_TOLERANCE = 1e-9


@dataclass
class PerturbationResult:
    """One evaluation of the perturbation map."""

    target: np.ndarray
    x: np.ndarray
    y: np.ndarray
    schedule: Schedule
    steer_residual: float
    distance: float
    flagged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": [float(v) for v in self.target],
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "schedule": self.schedule.to_literal(),
            "steer_residual": self.steer_residual,
            "replay_dist": self.distance,
            "flagged": self.flagged,
        }


def replay(
    X: ControlSystem,
    Y: ControlSystem,
    schedule: Schedule,
    x0: Sequence[Any],
    options: Optional[SteerOptions] = None,
):
    """Endpoints of the same schedule under X and under Y."""
    options = options or SteerOptions()
    x = flow_numeric(X, schedule, x0, options.step, options.blowup_cap, record=False).endpoint
    y = flow_numeric(Y, schedule, x0, options.step, options.blowup_cap, record=False).endpoint
    return x, y


def perturbation_map(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    target: Sequence[float],
    t: float,
    seed: int,
    options: Optional[SteerOptions] = None,
    threshold: Optional[float] = None,
    intended_radius: Optional[float] = None,
) -> PerturbationResult:
    """
    Steer X to ``target`` within horizon t, then replay the schedule under Y.

    The distance is between the two achieved endpoints, not the requested
    target. A steering residual above ``threshold`` flags the result.
    """
    if not X.same_shape(Y):
        raise InputError(f"Systems '{X.name}' and '{Y.name}' differ in shape")
    options = options or SteerOptions()
    goal = np.array([float(v) for v in target])
    center = np.array([float(v) for v in x0])
    outside = intended_radius is not None and (
        np.linalg.norm(goal - center) > intended_radius * (1 + 1e-12)
    )
    if outside:
        logger.warning(
            "Target %s lies outside the intended ball of radius %.3g", goal, intended_radius
        )
    steered = steer_to(X, center, goal, t, seed, options=options, compiled=compile_system(X))
    x, y = replay(X, Y, steered.schedule, center, options)
    flagged = threshold is not None and steered.distance > threshold
    if flagged:
        logger.warning(
            "Steering residual %.3g above threshold %.3g at t=%g", steered.distance, threshold, t
        )
    return PerturbationResult(
        target=goal,
        x=x,
        y=y,
        schedule=steered.schedule,
        steer_residual=steered.distance,
        distance=float(np.linalg.norm(y - x)),
        flagged=flagged,
    )


def ball_targets(x0: Sequence[Any], radius: float, count: int, seed: int) -> np.ndarray:
    """``count`` seeded points uniform in the closed ball of ``radius`` about x0."""
    center = np.array([float(v) for v in x0])
    points = []
    for index in range(count):
        rng = task_rng(seed, index)
        d = rng.standard_normal(center.size)
        d /= np.linalg.norm(d)
        points.append(center + radius * rng.random() ** (1.0 / center.size) * d)
    return np.array(points)


@dataclass
class ScalingRow:
    t: float
    target_idx: int
    steer_residual: float
    replay_dist: float


@dataclass
class PerturbReport:
    """Max and median replay distances per t and the fitted power law."""

    order: int
    constant: float
    times: List[float]
    max_distance: List[float]
    median_distance: List[float]
    rows: List[ScalingRow] = field(default_factory=list)
    exponent: Optional[float] = None
    alpha: Optional[float] = None
    alpha_bound: Optional[float] = None
    residual: Optional[float] = None
    t_min: Optional[float] = None
    fit_points: int = 0
    degenerate: bool = False
    diagnostics: List[str] = field(default_factory=list)

    def csv_rows(self) -> List[List[Any]]:
        return [[r.t, r.target_idx, r.steer_residual, r.replay_dist] for r in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "N": self.order,
            "C": self.constant,
            "times": list(self.times),
            "max_distance": list(self.max_distance),
            "median_distance": list(self.median_distance),
            "exponent": self.exponent,
            "alpha": self.alpha,
            "alpha_bound": self.alpha_bound,
            "residual": self.residual,
            "t_min": self.t_min,
            "fit_points": self.fit_points,
            "degenerate": self.degenerate,
            "diagnostics": list(self.diagnostics),
            "rows": [
                {
                    "t": r.t,
                    "target_idx": r.target_idx,
                    "steer_residual": r.steer_residual,
                    "replay_dist": r.replay_dist,
                }
                for r in self.rows
            ],
        }


def require_contact(X: ControlSystem, Y: ControlSystem, x0: Sequence[Any], N: int) -> None:
    contact = kth_contact(X, Y, x0, N)
    if not contact:
        raise InputError(
            f"'{X.name}' and '{Y.name}' lack {N}th contact at x0: {contact.witness.describe()}"
        )


def perturb_scaling_experiment(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    N: int,
    C: float,
    times: Sequence[float],
    targets: int,
    seed: int,
    options: Optional[SteerOptions] = None,
    noise_factor: float = DEFAULT_NOISE_FACTOR,
    tolerance: float = DEFAULT_TOLERANCE,
    jobs: int = 1,
) -> PerturbReport:
    """
    Replay distances for seeded targets in the ball of radius C t^N / 2,
    with a log-log fit of the max distance against t over the points above
    ``noise_factor * tolerance``.
    """
    require_contact(X, Y, x0, N)
    if targets < 1:
        raise InputError(f"Need at least one target per time, got {targets}")
    options = options or SteerOptions()
    report = PerturbReport(
        order=N,
        constant=float(C),
        times=[float(t) for t in times],
        max_distance=[],
        median_distance=[],
    )
    for ti, t in enumerate(times):
        radius = C * t**N / 2
        points = ball_targets(x0, radius, targets, derive_seed(seed, ti))

        def run(index: int) -> PerturbationResult:
            return perturbation_map(
                X,
                Y,
                x0,
                points[index],
                t,
                derive_seed(seed, ti, index),
                options=options,
                intended_radius=radius,
            )

        results = ordered_map(run, list(range(targets)), jobs)
        distances = [r.distance for r in results]
        report.rows.extend(
            ScalingRow(float(t), i, r.steer_residual, r.distance) for i, r in enumerate(results)
        )
        report.max_distance.append(float(np.max(distances)))
        report.median_distance.append(float(np.median(distances)))
        logger.info("t=%g: max replay distance %.3g", t, report.max_distance[-1])

    floor = noise_factor * tolerance
    usable = [(t, d) for t, d in zip(report.times, report.max_distance) if d > floor]
    report.fit_points = len(usable)
    if len({t for t, _ in usable}) < 2:
        report.degenerate = True
        report.diagnostics.append(
            f"fewer than two times with max distance above noise floor {floor:g}"
        )
        return report
    log_t = np.log([t for t, _ in usable])
    log_d = np.log([d for _, d in usable])
    coeffs, residuals, *_ = np.polyfit(log_t, log_d, 1, full=True)
    report.exponent = float(coeffs[0])
    report.alpha = float(math.exp(coeffs[1]))
    report.residual = float(math.sqrt(residuals[0] / len(usable))) if len(residuals) else 0.0
    report.alpha_bound = max(d / t ** (N + 1) for t, d in usable)
    report.t_min = max(t for t, _ in usable)
    if report.exponent < N + 1:
        report.diagnostics.append(
            f"fitted exponent {report.exponent:.3f} below the expected {N + 1}"
        )
    return report


def main_theorem_experiment(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    N: int,
    C: float,
    times: Sequence[float],
    seed: int,
    check_x: bool = True,
    **growth_options: Any,
) -> GrowthReport:
    """
    Growth test of Y at order N with constant C / 2, after confirming Nth
    contact and (unless ``check_x`` is off) that X passes at (N, C).
    """
    require_contact(X, Y, x0, N)
    if check_x:
        base = growth_rate_test(X, x0, N, C, times, seed, **growth_options)
        if not base.passed:
            raise InputError(
                f"'{X.name}' does not pass the growth test at N={N}, C={C}: "
                + ", ".join(f"t={r.t:g} coverage {r.coverage:.3f}" for r in base.rows)
            )
    report = growth_rate_test(Y, x0, N, C / 2, times, seed, **growth_options)
    logger.info("%s at N=%d, C/2=%g: %s", Y.name, N, C / 2, report.verdict)
    return report


@dataclass
class ContinuityReport:
    """Replay endpoints along a segment of targets."""

    targets: List[List[float]]
    x_endpoints: List[List[float]]
    y_endpoints: List[List[float]]
    max_jump_ratio: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "targets": self.targets,
            "x": self.x_endpoints,
            "y": self.y_endpoints,
            "max_jump_ratio": self.max_jump_ratio,
        }


def selection_continuity(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    start: Sequence[float],
    end: Sequence[float],
    points: int,
    t: float,
    seed: int,
    options: Optional[SteerOptions] = None,
) -> ContinuityReport:
    """
    Evaluate the perturbation map on ``points`` equally spaced targets from
    ``start`` to ``end``; the jump ratio compares consecutive Y-endpoint
    gaps with the target spacing.
    """
    if points < 2:
        raise InputError(f"Need at least two points, got {points}")
    a = np.array([float(v) for v in start])
    b = np.array([float(v) for v in end])
    targets = [a + (b - a) * i / (points - 1) for i in range(points)]
    results = [
        perturbation_map(X, Y, x0, target, t, derive_seed(seed, i), options=options)
        for i, target in enumerate(targets)
    ]
    spacing = float(np.linalg.norm(b - a)) / (points - 1)
    jumps = [
        float(np.linalg.norm(r2.y - r1.y)) / spacing if spacing > 0 else 0.0
        for r1, r2 in zip(results, results[1:])
    ]
    return ContinuityReport(
        targets=[[float(v) for v in p] for p in targets],
        x_endpoints=[[float(v) for v in r.x] for r in results],
        y_endpoints=[[float(v) for v in r.y] for r in results],
        max_jump_ratio=max(jumps),
    )


@dataclass
class DirectionsReport:
    """Order scans of the signed axes under X and Y, plus their contact orders."""

    contact_orders: Dict[int, bool]
    x_scans: List[OrderScanResult]
    y_scans: List[OrderScanResult]

    @property
    def matches(self) -> bool:
        """Y finds the same order as X in every direction X found."""
        return all(
            sx.order == sy.order
            for sx, sy in zip(self.x_scans, self.y_scans)
            if sx.order is not None
        )

    def csv_rows(self) -> List[List[Any]]:
        return [
            [sx.label, "" if sx.order is None else sx.order, "" if sy.order is None else sy.order]
            for sx, sy in zip(self.x_scans, self.y_scans)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "contact": {str(k): v for k, v in sorted(self.contact_orders.items())},
            "matches": self.matches,
            "directions": [
                {"direction": sx.label, "order_x": sx.order, "order_y": sy.order}
                for sx, sy in zip(self.x_scans, self.y_scans)
            ],
        }


def example_directions_experiment(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    k_max: int,
    times: Sequence[float],
    seed: int,
    contact_orders: Sequence[int] = (),
    c: float = DEFAULT_SCALE,
    options: Optional[SteerOptions] = None,
    jobs: int = 1,
    **scan_options: Any,
) -> DirectionsReport:
    """
    Order scans along +-e_i for X and Y with identical seeds, plus kth-contact
    verdicts at each of ``contact_orders``.
    """
    contact = {k: kth_contact(X, Y, x0, k).has_contact for k in contact_orders}
    directions = axis_directions(X.dim)

    def scan(sys: ControlSystem, index: int) -> OrderScanResult:
        return order_scan(
            sys,
            x0,
            directions[index],
            k_max,
            times,
            derive_seed(seed, index),
            c=c,
            steer=options,
            **scan_options,
        )

    indices = list(range(len(directions)))
    x_scans = ordered_map(lambda i: scan(X, i), indices, jobs)
    y_scans = ordered_map(lambda i: scan(Y, i), indices, jobs)
    for sx, sy in zip(x_scans, y_scans):
        logger.info(
            "%s: order %s under %s, %s under %s",
            direction_label(sx.direction),
            sx.order,
            X.name,
            sy.order,
            Y.name,
        )
    return DirectionsReport(contact_orders=contact, x_scans=x_scans, y_scans=y_scans)
