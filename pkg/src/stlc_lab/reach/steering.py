"""
Steering by derivative-free search over fixed-length schedules.

A p-segment schedule is encoded as one real vector

    z = (u^1 .. u^p, w_1 .. w_p, sigma)

decoded as controls clip(u^j, -1, 1), durations sigma * t * |w_j| / sum |w|
and sigma clipped to [0, duration_scale], so every candidate respects the
control box and has total duration strictly below t. Nelder-Mead runs from a
warm start (the nearest endpoint of a small bang-bang sample) and from seeded
random starts; the best endpoint wins.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from ..chrono.compiled import CompiledSystem, compile_system
from ..chrono.integrator import DEFAULT_BLOWUP_CAP, DEFAULT_STEP, integrate_schedule
from ..core.errors import BlowUpError, InputError
from ..core.system import ControlSystem, Schedule, Segment, require_valid
from ..utils.parallel import derive_seed, task_rng
from .sampler import DEFAULT_DURATION_SCALE, ReachSample, sample_reachable

logger = logging.getLogger(__name__)

BLOWUP_PENALTY = 1e12


@dataclass
class SteerOptions:
    """Budget and tolerances of one steering run."""

    segments: int = 4
    restarts: int = 4
    maxiter: int = 2000
    xatol: float = 1e-6
    fatol: float = 1e-12
    warm_samples: int = 256
    stop_tolerance: float = 0.0
    duration_scale: float = DEFAULT_DURATION_SCALE
    step: float = DEFAULT_STEP
    blowup_cap: float = DEFAULT_BLOWUP_CAP

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SteerResult:
    """Best schedule found for a target; ``distance`` is |endpoint - target|."""

    target: np.ndarray
    endpoint: np.ndarray
    distance: float
    schedule: Schedule
    iterations: int = 0
    evaluations: int = 0
    runs: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": [float(v) for v in self.target],
            "endpoint": [float(v) for v in self.endpoint],
            "distance": self.distance,
            "schedule": self.schedule.to_literal(),
            "total": float(self.schedule.total),
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "runs": list(self.runs),
        }


class ScheduleCodec:
    """Maps optimizer vectors to admissible schedules and back."""

    def __init__(self, m: int, p: int, t: float, duration_scale: float):
        self.m = m
        self.p = p
        self.t = t
        self.duration_scale = duration_scale

    @property
    def size(self) -> int:
        return self.p * self.m + self.p + 1

    def decode(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        split = self.p * self.m
        controls = np.clip(z[:split], -1.0, 1.0).reshape(self.p, self.m)
        weights = np.abs(z[split : split + self.p])
        sigma = float(np.clip(z[-1], 0.0, self.duration_scale))
        total = weights.sum()
        if total <= 0.0 or sigma == 0.0:
            return controls, np.zeros(self.p)
        return controls, sigma * self.t * weights / total

    def encode(self, schedule: Schedule) -> np.ndarray:
        controls = np.array([[float(v) for v in u] for u in schedule.controls]).reshape(
            self.p, self.m
        )
        durations = np.array([float(s) for s in schedule.durations])
        total = durations.sum()
        weights = durations / total if total > 0 else np.full(self.p, 1.0 / self.p)
        return np.concatenate([controls.ravel(), weights, [total / self.t]])

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate(
            [
                rng.uniform(-1.0, 1.0, self.p * self.m),
                rng.uniform(0.05, 1.0, self.p),
                [rng.uniform(0.3, self.duration_scale)],
            ]
        )

    def schedule(self, z: np.ndarray) -> Schedule:
        controls, durations = self.decode(z)
        return Schedule(
            tuple(
                Segment(tuple(float(v) for v in u), float(s))
                for u, s in zip(controls, durations)
            )
        )


def steer_to(
    sys: ControlSystem,
    x0: Sequence[Any],
    target: Sequence[float],
    t: float,
    seed: int,
    options: Optional[SteerOptions] = None,
    warm: Optional[ReachSample] = None,
    compiled: Optional[CompiledSystem] = None,
) -> SteerResult:
    """
    Minimize |endpoint(schedule) - target| over p-segment schedules with
    total duration < t. Never raises on poor convergence; the caller judges
    the returned distance.
    """
    require_valid(sys)
    if t <= 0:
        raise InputError(f"Horizon t must be positive, got {t}")
    options = options or SteerOptions()
    compiled = compiled or compile_system(sys)
    start = np.array([float(v) for v in x0])
    goal = np.array([float(v) for v in target])
    if start.shape != (sys.dim,) or goal.shape != (sys.dim,):
        raise InputError(f"x0 and target must both have {sys.dim} coordinates")
    codec = ScheduleCodec(sys.m, options.segments, t, options.duration_scale)

    evaluations = 0

    def objective(z: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        controls, durations = codec.decode(z)
        try:
            end = integrate_schedule(
                compiled, controls, durations, start, options.step, options.blowup_cap
            ).endpoint
        except BlowUpError:
            return BLOWUP_PENALTY
        return float(np.linalg.norm(end - goal))

    if warm is None and options.warm_samples > 0:
        warm = sample_reachable(
            sys,
            start,
            t,
            options.warm_samples,
            options.segments,
            derive_seed(seed, 0),
            duration_scale=options.duration_scale,
            step=options.step,
            blowup_cap=options.blowup_cap,
            compiled=compiled,
        )
    starts: List[np.ndarray] = []
    if warm is not None and len(warm) and warm.segments == options.segments:
        _, nearest = cKDTree(warm.endpoints).query(goal)
        starts.append(codec.encode(warm.schedules[int(nearest)]))
    for restart in range(options.restarts):
        starts.append(codec.random(task_rng(seed, restart + 1)))
    if not starts:
        raise InputError("Steering needs at least one start (restarts or warm samples)")

    best_z: Optional[np.ndarray] = None
    best_value = np.inf
    iterations = 0
    runs: List[float] = []
    for z0 in starts:
        value0 = objective(z0)
        if value0 <= options.stop_tolerance:
            z, value = z0, value0
        else:
            result = minimize(
                objective,
                z0,
                method="Nelder-Mead",
                options={
                    "maxiter": options.maxiter,
                    "xatol": options.xatol,
                    "fatol": options.fatol,
                    "adaptive": codec.size > 8,
                },
            )
            iterations += int(result.nit)
            z, value = result.x, float(result.fun)
        runs.append(value)
        if value < best_value:
            best_z, best_value = z, value
        if best_value <= options.stop_tolerance:
            break

    schedule = codec.schedule(best_z)
    controls, durations = codec.decode(best_z)
    try:
        end = integrate_schedule(
            compiled, controls, durations, start, options.step, options.blowup_cap
        ).endpoint
    except BlowUpError:
        end = np.full(sys.dim, np.nan)
    distance = float(np.linalg.norm(end - goal))
    logger.debug(
        "Steered %s to %s within %.3g after %d evaluations", sys.name, goal, distance, evaluations
    )
    return SteerResult(
        target=goal,
        endpoint=end,
        distance=distance,
        schedule=schedule,
        iterations=iterations,
        evaluations=evaluations,
        runs=runs,
    )
