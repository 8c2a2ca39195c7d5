"""
Truncated chronological exponentials of piecewise-constant polynomial fields.

For a schedule with segment fields V_1, ..., V_p (chronological order) the
flow acts on functions as

    f(x(t)) = (exp(s_1 V_1) exp(s_2 V_2) ... exp(s_p V_p) f)(x0)

so the first segment's operator is outermost. Expanding every exponential and
keeping the terms of total degree <= k in (s_1, ..., s_p) gives the kth
Picard iterate of the time-varying field. Each kept term is a product

    s_1^{m_1} ... s_p^{m_p} / (m_1! ... m_p!) * (V_1^{m_1} ... V_p^{m_p} f)(x0)

and the nested derivatives are built from the innermost segment outwards so
that every suffix is computed once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..core.errors import InputError
from ..core.poly import Poly, PolyVectorField, as_rational, lie_derivative
from ..core.system import ControlSystem, control_vf


def chrono_power(V: PolyVectorField, f: Poly, l: int) -> Poly:
    """The l-fold Lie derivative V̂^l f."""
    if V.dim != f.dim:
        raise InputError(
            f"Dimension mismatch: vector field on R^{V.dim} applied to a function on R^{f.dim}"
        )
    if l < 0:
        raise InputError(f"Power must be non-negative, got {l}")
    result = f
    for _ in range(l):
        if result.is_zero():
            break
        result = lie_derivative(V, result)
    return result


@dataclass(frozen=True)
class CoefficientMismatch:
    """First coefficient at which two flow polynomials differ."""

    coordinate: int
    monomial: Tuple[int, ...]
    lhs: Fraction
    rhs: Fraction

    def describe(self) -> str:
        mono = Poly.monomial(self.monomial).to_text(prefix="s")
        return f"x{self.coordinate + 1}: coefficient of {mono} is {self.lhs} vs {self.rhs}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coordinate": self.coordinate + 1,
            "monomial": list(self.monomial),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass(frozen=True)
class FlowPolynomial:
    """
    ev_{x0} of the truncated chronological exponential applied to each x^i,
    as exact polynomials in the segment durations s_1..s_p.
    """

    dim: int
    segments: int
    order: int
    coordinates: Tuple[Poly, ...]

    def evaluate(self, durations: Sequence[Union[int, float, Fraction]]) -> List[Union[Fraction, float]]:
        if len(durations) != self.segments:
            raise InputError(
                f"Expected {self.segments} durations, got {len(durations)}"
            )
        return [poly.evaluate(durations) for poly in self.coordinates]

    def truncate(self, order: int) -> FlowPolynomial:
        """Drop every term of total degree above ``order``."""
        kept = tuple(
            Poly(self.segments, {e: c for e, c in poly.terms.items() if sum(e) <= order})
            for poly in self.coordinates
        )
        return FlowPolynomial(self.dim, self.segments, min(order, self.order), kept)

    def first_difference(self, other: FlowPolynomial) -> Optional[CoefficientMismatch]:
        """The lowest-degree differing coefficient, or ``None`` if identical."""
        if (self.dim, self.segments) != (other.dim, other.segments):
            raise InputError("Flow polynomials of different shapes cannot be compared")
        mismatches = []
        for i, (a, b) in enumerate(zip(self.coordinates, other.coordinates)):
            delta = a - b
            if not delta.is_zero():
                exps = min(delta.terms, key=lambda e: (sum(e), e))
                mismatches.append((sum(exps), i, exps))
        if not mismatches:
            return None
        _, i, exps = min(mismatches)
        return CoefficientMismatch(
            i, exps, self.coordinates[i].coefficient(exps), other.coordinates[i].coefficient(exps)
        )

    def to_text(self) -> List[str]:
        return [poly.to_text(prefix="s") for poly in self.coordinates]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "segments": self.segments,
            "order": self.order,
            "coordinates": self.to_text(),
        }


def _rational_controls(controls: Sequence[Sequence[Any]]) -> List[Tuple[Fraction, ...]]:
    exact = []
    for index, u in enumerate(controls):
        row = []
        for value in u:
            if isinstance(value, float):
                raise InputError(
                    f"Control {index + 1} has a float component {value!r}; "
                    "symbolic expansion needs exact rationals"
                )
            row.append(as_rational(value))
        exact.append(tuple(row))
    return exact


def segment_fields(sys: ControlSystem, controls: Sequence[Sequence[Any]]) -> List[PolyVectorField]:
    """Exact fields X_{u^j} for a list of rational controls."""
    if not controls:
        raise InputError("At least one segment is required")
    return [control_vf(sys, u) for u in _rational_controls(controls)]


def exp_trunc_schedule(
    sys: ControlSystem,
    controls: Sequence[Sequence[Any]],
    k: int,
    x0: Optional[Sequence[Any]] = None,
) -> FlowPolynomial:
    """
    Order-k truncated chronological exponential of a piecewise-constant
    schedule, evaluated at x0, as polynomials in the formal durations.
    """
    if k < 0:
        raise InputError(f"Truncation order must be non-negative, got {k}")
    fields = segment_fields(sys, controls)
    point = [as_rational(v) for v in (sys.origin if x0 is None else x0)]
    if len(point) != sys.dim:
        raise InputError(f"x0 has {len(point)} coordinates, system lives on R^{sys.dim}")
    p = len(fields)

    # Work in y = x - x0. A Lie derivative lowers the y-degree by at most one,
    # so a function still facing b derivatives only matters up to y-degree b,
    # and field terms above y-degree k - 1 never reach the constant term.
    centered = [
        PolyVectorField(tuple(c.translate(point).truncate(k - 1) for c in vf.components))
        for vf in fields
    ]

    coordinates = []
    for i in range(sys.dim):
        # tail multiplicities (m_j, ..., m_p) -> V_j^{m_j} ... V_p^{m_p} x^i
        start = (Poly.variable(i, sys.dim) + point[i]).truncate(k)
        tails: Dict[Tuple[int, ...], Poly] = {(): start}
        for vf in reversed(centered):
            extended: Dict[Tuple[int, ...], Poly] = {}
            for tail, poly in tails.items():
                budget = k - sum(tail)
                current = poly
                for power in range(budget + 1):
                    if current.is_zero():
                        break
                    extended[(power,) + tail] = current
                    if power < budget:
                        current = lie_derivative(vf, current).truncate(budget - power - 1)
            tails = extended
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for powers, poly in tails.items():
            value = poly.constant_term()
            if value:
                denominator = math.prod(math.factorial(e) for e in powers)
                terms[powers] = Fraction(value) / denominator
        coordinates.append(Poly(p, terms))
    return FlowPolynomial(dim=sys.dim, segments=p, order=k, coordinates=tuple(coordinates))
