"""
Deterministic fixed-step RK4 flows of piecewise-constant schedules.

Each segment of duration s is split into ceil(s / step) equal steps of size
h = s / ceil(s / step), so a schedule always lands exactly on its segment
boundaries. Completeness of the fields is assumed; a state-norm cap turns a
finite-time blow-up into a ``BlowUpError``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.errors import BlowUpError, InputError
from ..core.system import ControlSystem, Schedule
from .compiled import CompiledSystem, compile_system

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
DEFAULT_BLOWUP_CAP = 1e6


@dataclass
class FlowResult:
    """Endpoint of a flow plus the sampled trajectory."""

    endpoint: np.ndarray
    times: np.ndarray
    states: np.ndarray
    steps: int = 0
    segment_ends: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "endpoint": [float(v) for v in self.endpoint],
            "steps": self.steps,
            "trace": [
                [float(t)] + [float(v) for v in state]
                for t, state in zip(self.times, self.states)
            ],
        }


def _rk4_step(
    compiled: CompiledSystem, matrix: np.ndarray, x: np.ndarray, h: float
) -> np.ndarray:
    rhs = compiled.rhs
    k1 = rhs(matrix, x)
    k2 = rhs(matrix, x + 0.5 * h * k1)
    k3 = rhs(matrix, x + 0.5 * h * k2)
    k4 = rhs(matrix, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_schedule(
    compiled: CompiledSystem,
    controls: Sequence[Sequence[float]],
    durations: Sequence[float],
    x0: Sequence[float],
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    record: bool = False,
) -> FlowResult:
    """
    RK4 over raw control/duration arrays.

    With ``record`` the state after every step is kept; otherwise only the
    segment boundaries are.
    """
    if step <= 0:
        raise InputError(f"Integration step must be positive, got {step}")
    if len(controls) != len(durations):
        raise InputError(f"Got {len(durations)} durations for {len(controls)} segments")
    x = np.array([float(v) for v in x0], dtype=float)
    if x.shape != (compiled.dim,):
        raise InputError(f"x0 has {x.size} coordinates, system lives on R^{compiled.dim}")

    clock = 0.0
    times = [0.0]
    states = [x.copy()]
    segment_ends = []
    total_steps = 0
    for segment, (u, duration) in enumerate(zip(controls, durations)):
        duration = float(duration)
        if duration < 0:
            raise InputError(f"Segment {segment} has negative duration {duration}")
        if duration == 0.0:
            segment_ends.append(len(states) - 1)
            continue
        matrix = compiled.field_matrix([float(v) for v in u])
        count = math.ceil(duration / step)
        h = duration / count
        for n in range(count):
            x = _rk4_step(compiled, matrix, x, h)
            norm = float(np.linalg.norm(x))
            if not math.isfinite(norm) or norm > blowup_cap:
                elapsed = clock + (n + 1) * h
                raise BlowUpError(segment, elapsed, norm if math.isfinite(norm) else None)
            if record:
                times.append(clock + (n + 1) * h)
                states.append(x.copy())
        clock += duration
        total_steps += count
        if not record:
            times.append(clock)
            states.append(x.copy())
        segment_ends.append(len(states) - 1)

    return FlowResult(
        endpoint=x,
        times=np.array(times),
        states=np.array(states),
        steps=total_steps,
        segment_ends=segment_ends,
    )


def flow_numeric(
    sys: ControlSystem,
    schedule: Schedule,
    x0: Optional[Sequence[Any]] = None,
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    record: bool = True,
    compiled: Optional[CompiledSystem] = None,
) -> FlowResult:
    """Integrate ``sys`` along ``schedule`` from ``x0`` (default: the system basepoint)."""
    compiled = compiled or compile_system(sys)
    start = sys.origin if x0 is None else x0
    logger.debug("Integrating %s over %d segments, step %g", sys.name, len(schedule), step)
    return integrate_schedule(
        compiled,
        schedule.controls,
        schedule.durations,
        start,
        step=step,
        blowup_cap=blowup_cap,
        record=record,
    )


def endpoint(
    compiled: CompiledSystem,
    controls: Sequence[Sequence[float]],
    durations: Sequence[float],
    x0: Sequence[float],
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
) -> np.ndarray:
    return integrate_schedule(compiled, controls, durations, x0, step, blowup_cap).endpoint
