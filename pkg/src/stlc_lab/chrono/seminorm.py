"""
Grid estimate of the real-analytic seminorms on polynomial vector fields.

    rho(V) = sup_{x in K, r} a_0 a_1 ... a_|r| / |r|! * |D^r (V f)(x)|

For polynomial V and f only multi-indices up to deg(V f) contribute, so the
sup over r is a finite max. The sup over the box K is taken on a regular
grid, which makes the returned value a lower bound of the true seminorm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..core.errors import InputError
from ..core.poly import Poly, PolyVectorField, as_rational, lie_derivative, multi_indices
from .compiled import evaluate_poly_grid

DEFAULT_GRID = 11
DEFAULT_WEIGHT_RATIO = Fraction(1, 2)


@dataclass(frozen=True)
class SeminormSpec:
    """Compact box K, decreasing weights a and grid resolution per axis."""

    box: Tuple[Tuple[Fraction, Fraction], ...]
    weights: Tuple[Fraction, ...]
    grid: int = DEFAULT_GRID

    def __post_init__(self) -> None:
        box = tuple((as_rational(lo), as_rational(hi)) for lo, hi in self.box)
        weights = tuple(as_rational(a) for a in self.weights)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "weights", weights)
        if not box:
            raise InputError("Seminorm box must have at least one axis")
        for axis, (lo, hi) in enumerate(box):
            if not lo < hi:
                raise InputError(f"Box axis {axis + 1} is degenerate: [{lo}, {hi}]")
        if not weights:
            raise InputError("Weight sequence must not be empty")
        if any(a <= 0 for a in weights):
            raise InputError("Weights must be strictly positive")
        if any(b > a for a, b in zip(weights, weights[1:])):
            raise InputError("Weights must be non-increasing")
        if self.grid < 2:
            raise InputError(f"Grid needs at least 2 points per axis, got {self.grid}")

    @classmethod
    def geometric(
        cls,
        box: Sequence[Tuple[Any, Any]],
        length: int,
        ratio: Any = DEFAULT_WEIGHT_RATIO,
        grid: int = DEFAULT_GRID,
    ) -> SeminormSpec:
        """Weights a_i = ratio^i for i < length."""
        q = as_rational(ratio)
        if not 0 < q <= 1:
            raise InputError(f"Weight ratio must lie in (0, 1], got {q}")
        return cls(tuple(box), tuple(q**i for i in range(length)), grid)

    @property
    def dim(self) -> int:
        return len(self.box)

    def points(self) -> np.ndarray:
        axes = [np.linspace(float(lo), float(hi), self.grid) for lo, hi in self.box]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "box": [[str(lo), str(hi)] for lo, hi in self.box],
            "weights": [str(a) for a in self.weights],
            "grid": self.grid,
        }


def seminorm(V: PolyVectorField, f: Poly, spec: SeminormSpec) -> float:
    if V.dim != spec.dim:
        raise InputError(f"Box has {spec.dim} axes, vector field lives on R^{V.dim}")
    vf = lie_derivative(V, f)
    if vf.is_zero():
        return 0.0
    top = vf.degree
    if len(spec.weights) < top + 1:
        raise InputError(
            f"Weight sequence has {len(spec.weights)} entries, "
            f"needs {top + 1} to cover derivatives of degree {top}"
        )
    prefix = list(itertools.accumulate(spec.weights, lambda a, b: a * b))
    points = spec.points()
    best = 0.0
    for r in multi_indices(V.dim, top):
        derivative = vf.dpow(r)
        if derivative.is_zero():
            continue
        weight = float(prefix[r.order]) / math.factorial(r.order)
        peak = float(np.max(np.abs(evaluate_poly_grid(derivative, points))))
        best = max(best, weight * peak)
    return best
