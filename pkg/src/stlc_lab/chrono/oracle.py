"""
Brute-force Picard iterate by literal iterated integration.

The kth iterate satisfies

    P_k(t) f = f + int_0^t P_{k-1}(tau) (X_tau f) dtau,    P_0 = id,

and for a piecewise-constant field X_tau = V_j on segment j, the map
tau -> ev_{x0} P_k(tau) f is a piecewise polynomial in tau. Each piece is
integrated exactly with rational arithmetic, so the result can be compared
to ``exp_trunc_schedule`` with zero tolerance. The recursion visits p^k
derivative words, hence the hard limits.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, List, Sequence

from ..core.errors import InputError
from ..core.poly import Poly, PolyVectorField, as_rational, lie_derivative
from ..core.system import ControlSystem
from .expansion import segment_fields

MAX_ORDER = 4
MAX_SEGMENTS = 3


def _pieces(
    level: int,
    f: Poly,
    fields: Sequence[PolyVectorField],
    breaks: Sequence[Fraction],
    x0: Sequence[Fraction],
) -> List[Poly]:
    """Per-segment polynomials in global time tau for ev_{x0} P_level(tau) f."""
    start_value = f.evaluate(x0)
    if level == 0:
        return [Poly.constant(start_value, 1) for _ in fields]
    pieces = []
    accumulated = Poly.constant(start_value, 1)
    for j, vf in enumerate(fields):
        integrand = _pieces(level - 1, lie_derivative(vf, f), fields, breaks, x0)[j]
        antiderivative = integrand.integrate(0)
        piece = accumulated + antiderivative - antiderivative.evaluate([breaks[j]])
        pieces.append(piece)
        accumulated = Poly.constant(piece.evaluate([breaks[j + 1]]), 1)
    return pieces


def picard_direct_oracle(
    sys: ControlSystem,
    controls: Sequence[Sequence[Any]],
    k: int,
    x0: Sequence[Any],
    durations: Sequence[Any],
) -> List[Fraction]:
    """Exact kth Picard iterate of x^i at the end of the schedule, for every i."""
    if not 0 <= k <= MAX_ORDER:
        raise InputError(f"Oracle supports orders 0..{MAX_ORDER}, got {k}")
    if not 1 <= len(controls) <= MAX_SEGMENTS:
        raise InputError(f"Oracle supports 1..{MAX_SEGMENTS} segments, got {len(controls)}")
    if len(durations) != len(controls):
        raise InputError(f"Got {len(durations)} durations for {len(controls)} segments")
    for value in durations:
        if isinstance(value, float):
            raise InputError("Oracle durations must be exact rationals")
    spans = [as_rational(v) for v in durations]
    if any(s < 0 for s in spans):
        raise InputError("Durations must be non-negative")
    point = [as_rational(v) for v in x0]
    if len(point) != sys.dim:
        raise InputError(f"x0 has {len(point)} coordinates, system lives on R^{sys.dim}")
    fields = segment_fields(sys, controls)

    breaks = [Fraction(0)]
    for span in spans:
        breaks.append(breaks[-1] + span)
    total = breaks[-1]

    endpoint = []
    for i in range(sys.dim):
        last = _pieces(k, Poly.variable(i, sys.dim), fields, breaks, point)[-1]
        endpoint.append(Fraction(last.evaluate([total])))
    return endpoint
