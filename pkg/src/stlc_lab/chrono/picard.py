"""
Truncation error of Picard iterates against the numerical flow.

``picard_fit`` measures |flow - ev_{x0} exp_k| on a grid of orders and
times, fits the log-log slope per order (expected k + 1) and fits a bound of
the form (M t)^{k+1} / (1 - M t) * L shared by every order on the grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from ..core.errors import InputError
from ..core.system import ControlSystem
from .compiled import compile_system
from .expansion import FlowPolynomial, exp_trunc_schedule
from .integrator import DEFAULT_BLOWUP_CAP, DEFAULT_STEP, integrate_schedule

logger = logging.getLogger(__name__)

DEFAULT_NOISE_FLOOR = 1e-13


def analytic_exp_remainder(t: float, k: int) -> float:
    """|e^t - sum_{l<=k} t^l / l!|, the exact error for x' = x from x0 = 1."""
    partial = sum(t**l / math.factorial(l) for l in range(k + 1))
    return abs(math.exp(t) - partial)


def _float_point(x0: Sequence[Any]) -> List[float]:
    return [float(v) for v in x0]


def picard_error(
    sys: ControlSystem,
    controls: Sequence[Sequence[Any]],
    durations: Sequence[Any],
    x0: Sequence[Any],
    k: int,
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    expansion: Optional[FlowPolynomial] = None,
) -> float:
    """Euclidean distance between the RK4 endpoint and the order-k expansion."""
    expansion = expansion or exp_trunc_schedule(sys, controls, k, x0)
    truncated = np.array([float(v) for v in expansion.evaluate([float(s) for s in durations])])
    numeric = integrate_schedule(
        compile_system(sys),
        [[float(v) for v in u] for u in controls],
        [float(s) for s in durations],
        _float_point(x0),
        step=step,
        blowup_cap=blowup_cap,
    ).endpoint
    return float(np.linalg.norm(numeric - truncated))


@dataclass
class PicardPoint:
    k: int
    t: float
    error: float
    bound: Optional[float] = None


@dataclass
class SlopeFit:
    """Least-squares line log(error) = slope * log(t) + intercept."""

    slope: float
    intercept: float
    residual: float
    points: int


@dataclass
class PicardFitReport:
    """Measured truncation errors, per-order slopes and the fitted (M, L) bound."""

    points: List[PicardPoint] = field(default_factory=list)
    slopes: Dict[int, SlopeFit] = field(default_factory=dict)
    M: Optional[float] = None
    L: Optional[float] = None
    dominates: bool = False
    degenerate: bool = False
    diagnostics: List[str] = field(default_factory=list)

    def slope(self, k: int) -> Optional[float]:
        fit = self.slopes.get(k)
        return fit.slope if fit else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [
                {"k": p.k, "t": p.t, "error": p.error, "bound": p.bound} for p in self.points
            ],
            "slopes": {
                str(k): {
                    "slope": f.slope,
                    "intercept": f.intercept,
                    "residual": f.residual,
                    "points": f.points,
                }
                for k, f in sorted(self.slopes.items())
            },
            "M": self.M,
            "L": self.L,
            "dominates": self.dominates,
            "degenerate": self.degenerate,
            "diagnostics": list(self.diagnostics),
        }

    def csv_rows(self) -> List[List[Any]]:
        return [[p.k, p.t, p.error, "" if p.bound is None else p.bound] for p in self.points]


def picard_table(
    sys: ControlSystem,
    controls: Sequence[Sequence[Any]],
    x0: Sequence[Any],
    orders: Sequence[int],
    times: Sequence[float],
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    weights: Optional[Sequence[float]] = None,
) -> List[PicardPoint]:
    """
    Errors on the (k, t) grid; at time t segment j lasts t * weights[j]
    (equal split by default).
    """
    p = len(controls)
    if weights is None:
        weights = [1.0 / p] * p
    if len(weights) != p:
        raise InputError(f"Got {len(weights)} weights for {p} segments")
    expansions = {k: exp_trunc_schedule(sys, controls, k, x0) for k in sorted(set(orders))}
    compiled = compile_system(sys)
    float_controls = [[float(v) for v in u] for u in controls]
    points = []
    for t in times:
        durations = [t * w for w in weights]
        numeric = integrate_schedule(
            compiled, float_controls, durations, _float_point(x0), step, blowup_cap
        ).endpoint
        for k in orders:
            truncated = np.array([float(v) for v in expansions[k].evaluate(durations)])
            points.append(PicardPoint(k=k, t=float(t), error=float(np.linalg.norm(numeric - truncated))))
    return points


def _log_bound(params: np.ndarray, k: np.ndarray, t: np.ndarray) -> np.ndarray:
    log_m, log_l = params
    m = math.exp(log_m)
    return (k + 1) * (log_m + np.log(t)) - np.log1p(-m * t) + log_l


def picard_fit(
    sys: ControlSystem,
    controls: Sequence[Sequence[Any]],
    x0: Sequence[Any],
    orders: Sequence[int],
    times: Sequence[float],
    step: float = DEFAULT_STEP,
    blowup_cap: float = DEFAULT_BLOWUP_CAP,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
    slope_tolerance: Optional[float] = None,
) -> PicardFitReport:
    """
    Fit slopes and the (M, L) bound; degenerate grids are reported, not raised.

    With ``slope_tolerance`` set, orders whose fitted slope strays from k + 1
    by more than the tolerance get a diagnostic.
    """
    if not times or not orders:
        raise InputError("picard_fit needs at least one order and one time")
    if any(t <= 0 for t in times):
        raise InputError("Times must be positive")
    report = PicardFitReport(points=picard_table(sys, controls, x0, orders, times, step, blowup_cap))

    usable = [p for p in report.points if p.error > noise_floor]
    for k in sorted(set(orders)):
        rows = [p for p in usable if p.k == k]
        if len({p.t for p in rows}) < 2:
            report.diagnostics.append(f"k={k}: fewer than two errors above noise floor {noise_floor:g}")
            continue
        log_t = np.log([p.t for p in rows])
        log_e = np.log([p.error for p in rows])
        coeffs, residuals, *_ = np.polyfit(log_t, log_e, 1, full=True)
        residual = float(math.sqrt(residuals[0] / len(rows))) if len(residuals) else 0.0
        report.slopes[k] = SlopeFit(float(coeffs[0]), float(coeffs[1]), residual, len(rows))
        if slope_tolerance is not None and abs(coeffs[0] - (k + 1)) > slope_tolerance:
            report.diagnostics.append(f"k={k}: slope {coeffs[0]:.3f} differs from {k + 1}")

    if not usable:
        report.degenerate = True
        report.diagnostics.append("all errors at noise floor; no bound fitted")
        logger.info("Picard fit degenerate for %s: errors at noise floor", sys.name)
        return report

    k_arr = np.array([p.k for p in usable], dtype=float)
    t_arr = np.array([p.t for p in usable], dtype=float)
    e_arr = np.log([p.error for p in usable])
    upper = math.log(0.99 / float(t_arr.max()))
    start = np.array([min(0.0, upper - 0.1), 0.0])
    fit = least_squares(
        lambda params: _log_bound(params, k_arr, t_arr) - e_arr,
        start,
        bounds=([-50.0, -50.0], [upper, 50.0]),
    )
    log_m, log_l = fit.x
    # Lift L until the bound dominates every measured point.
    excess = float(np.max(e_arr - _log_bound(fit.x, k_arr, t_arr)))
    if excess > 0:
        log_l += excess + 1e-9
    report.M = math.exp(log_m)
    report.L = math.exp(log_l)

    t_max = max(times)
    if report.M * t_max >= 1:
        report.diagnostics.append("fitted M violates M t < 1 on the grid")
    for point in report.points:
        if report.M * point.t < 1:
            point.bound = (report.M * point.t) ** (point.k + 1) / (1 - report.M * point.t) * report.L
    # Errors at the noise floor carry no information about the bound.
    report.dominates = all(
        p.error <= noise_floor or (p.bound is not None and p.error <= p.bound * (1 + 1e-9))
        for p in report.points
    )
    return report
