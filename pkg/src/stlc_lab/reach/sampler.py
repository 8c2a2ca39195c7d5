"""
Monte Carlo samples of the reachable set R(< t, x0) under piecewise-constant
controls, and the direction sets used to probe them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from ..chrono.compiled import CompiledSystem, compile_system
from ..chrono.integrator import DEFAULT_BLOWUP_CAP, DEFAULT_STEP, integrate_schedule
from ..core.errors import BlowUpError, InputError
from ..core.system import ControlSystem, Schedule, Segment, require_valid
from ..utils.parallel import ordered_map, task_rng

logger = logging.getLogger(__name__)

DEFAULT_DURATION_SCALE = 0.99


class SamplingMode(Enum):
    """How segment controls are drawn."""
    BANG_BANG = "bang-bang"
    UNIFORM = "uniform"


@dataclass
class ReachSample:
    """Endpoints of sampled schedules with total duration strictly below ``t``."""

    basepoint: np.ndarray
    t: float
    endpoints: np.ndarray
    schedules: List[Schedule]
    segments: int
    seed: int
    count: int
    mode: SamplingMode = SamplingMode.BANG_BANG
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.schedules)

    @property
    def dim(self) -> int:
        return int(self.basepoint.shape[0])

    def extend(self, other: ReachSample) -> ReachSample:
        """Union of two samples taken from the same basepoint and horizon."""
        if other.t != self.t or not np.array_equal(other.basepoint, self.basepoint):
            raise InputError("Only samples with equal basepoint and horizon can be merged")
        return ReachSample(
            basepoint=self.basepoint,
            t=self.t,
            endpoints=np.vstack([self.endpoints, other.endpoints]),
            schedules=self.schedules + other.schedules,
            segments=self.segments,
            seed=self.seed,
            count=self.count + other.count,
            mode=self.mode,
            dropped=self.dropped + other.dropped,
        )

    def csv_rows(self) -> List[List[Any]]:
        return [
            [idx] + [repr(float(v)) for v in point] + [schedule.to_literal()]
            for idx, (point, schedule) in enumerate(zip(self.endpoints, self.schedules))
        ]

    def csv_header(self) -> List[str]:
        return ["idx"] + [f"x_{i + 1}" for i in range(self.dim)] + ["schedule"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basepoint": [float(v) for v in self.basepoint],
            "t": self.t,
            "segments": self.segments,
            "seed": self.seed,
            "count": self.count,
            "mode": self.mode.value,
            "dropped": self.dropped,
            "points": [
                {"endpoint": [float(v) for v in point], "schedule": schedule.to_literal()}
                for point, schedule in zip(self.endpoints, self.schedules)
            ],
        }


def draw_schedule(
    rng: np.random.Generator,
    m: int,
    p: int,
    t: float,
    mode: SamplingMode = SamplingMode.BANG_BANG,
    duration_scale: float = DEFAULT_DURATION_SCALE,
) -> Schedule:
    """
    One random p-segment schedule: simplex weights times sigma * t with
    sigma in (0, duration_scale], so the total stays strictly below t.
    """
    if mode is SamplingMode.BANG_BANG:
        controls = [tuple(int(v) for v in rng.integers(-1, 2, size=m)) for _ in range(p)]
    else:
        controls = [tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=m)) for _ in range(p)]
    weights = rng.dirichlet(np.ones(p))
    sigma = duration_scale * (1.0 - rng.random())
    return Schedule(
        tuple(Segment(u, float(sigma * t * w)) for u, w in zip(controls, weights))
    )


def zero_schedule(m: int, p: int) -> Schedule:
    return Schedule(tuple(Segment((0,) * m, 0.0) for _ in range(p)))


def sample_reachable(
    sys: ControlSystem,
    x0: Sequence[Any],
    t: float,
    count: int,
    p: int,
    seed: int,
    mode: Union[SamplingMode, str] = SamplingMode.BANG_BANG,
    duration_scale: float = DEFAULT_DURATION_SCALE,
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    jobs: int = 1,
    compiled: Optional[CompiledSystem] = None,
) -> ReachSample:
    """
    Sample ``count`` random schedules and integrate them from ``x0``.

    Point 0 is always the zero-duration schedule (endpoint ``x0``). Schedules
    that blow up are dropped with a warning. Draw ``i`` uses its own generator
    seeded from ``(seed, i)``.
    """
    require_valid(sys)
    if t <= 0:
        raise InputError(f"Horizon t must be positive, got {t}")
    if count < 1:
        raise InputError(f"Sample count must be at least 1, got {count}")
    if p < 1:
        raise InputError(f"Segment count must be at least 1, got {p}")
    if not 0 < duration_scale < 1:
        raise InputError(f"Duration scale must lie in (0, 1), got {duration_scale}")
    mode = SamplingMode(mode)
    compiled = compiled or compile_system(sys)
    start = np.array([float(v) for v in x0])
    if start.shape != (sys.dim,):
        raise InputError(f"x0 has {start.size} coordinates, system lives on R^{sys.dim}")

    def run(index: int) -> Optional[tuple]:
        schedule = draw_schedule(task_rng(seed, index), sys.m, p, t, mode, duration_scale)
        try:
            flow = integrate_schedule(
                compiled, schedule.controls, schedule.durations, start, step, blowup_cap
            )
        except BlowUpError as e:
            logger.warning("Dropping sample %d: %s", index, e)
            return None
        return flow.endpoint, schedule

    results = ordered_map(run, list(range(count)), jobs)
    kept = [r for r in results if r is not None]
    endpoints = [start.copy()] + [point for point, _ in kept]
    schedules = [zero_schedule(sys.m, p)] + [schedule for _, schedule in kept]
    logger.debug("Sampled %d endpoints of %s at t=%g", len(kept), sys.name, t)
    return ReachSample(
        basepoint=start,
        t=float(t),
        endpoints=np.array(endpoints),
        schedules=schedules,
        segments=p,
        seed=seed,
        count=count,
        mode=mode,
        dropped=count - len(kept),
    )


def unit_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """
    ``count`` unit vectors in R^n: evenly spread for n <= 3 (alternating
    signs, equal angles, Fibonacci sphere) and seeded Gaussian otherwise.
    """
    if n < 1 or count < 1:
        raise InputError(f"Need n >= 1 and count >= 1, got n={n}, count={count}")
    if n == 1:
        return np.array([[1.0 if i % 2 == 0 else -1.0] for i in range(count)])
    if n == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if n == 3:
        golden = math.pi * (3.0 - math.sqrt(5.0))
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        theta = golden * i
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    return random_directions(n, count, seed)


def random_directions(n: int, count: int, seed: int) -> np.ndarray:
    """Seeded directions uniform on the unit sphere of R^n."""
    raw = np.random.default_rng(seed).standard_normal((count, n))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def axis_directions(n: int) -> np.ndarray:
    """+e1, -e1, +e2, -e2, ..., +en, -en."""
    eye = np.eye(n)
    return np.array([sign * eye[i] for i in range(n) for sign in (1.0, -1.0)])


def direction_label(v: Sequence[float]) -> str:
    """'+e3' for signed axes, a bracketed vector otherwise."""
    values = np.asarray(v, dtype=float)
    nonzero = np.flatnonzero(values)
    if len(nonzero) == 1 and abs(abs(values[nonzero[0]]) - 1.0) < 1e-12:
        sign = "+" if values[nonzero[0]] > 0 else "-"
        return f"{sign}e{nonzero[0] + 1}"
    return "[" + ", ".join(f"{x:.4g}" for x in values) + "]"
