"""
Taylor coefficients of polynomial vector fields and kth contact of systems.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence, Tuple

from .errors import InputError
from .poly import MultiIndex, PolyVectorField, as_rational
from .system import ControlSystem, require_valid

TaylorKey = Tuple[int, MultiIndex]


def taylor_coeffs(
    V: PolyVectorField, x0: Sequence[Any], k: int
) -> Dict[TaylorKey, Fraction]:
    """
    All derivatives D^r V^i(x0) with |r| <= k, computed exactly.

    The map is sparse: a missing ``(component, r)`` key means the derivative
    is exactly zero. Each monomial is differentiated and then evaluated at
    ``x0`` directly, so the polynomial is never re-expanded around ``x0``.
    """
    if len(x0) != V.dim:
        raise InputError(f"x0 has {len(x0)} coordinates, vector field lives on R^{V.dim}")
    if k < 0:
        raise InputError(f"Taylor order must be non-negative, got {k}")
    point = [as_rational(v) for v in x0]
    coeffs: Dict[TaylorKey, Fraction] = {}
    for component, poly in enumerate(V.components):
        for exps, coeff in poly.terms.items():
            ranges = [range(min(e, k) + 1) for e in exps]
            for r in itertools.product(*ranges):
                if sum(r) > k:
                    continue
                value = coeff
                for base, e, d in zip(point, exps, r):
                    value *= math.factorial(e) // math.factorial(e - d)
                    if e - d:
                        value *= base ** (e - d)
                if not value:
                    continue
                key = (component, MultiIndex(r))
                total = coeffs.get(key, Fraction(0)) + value
                if total:
                    coeffs[key] = total
                else:
                    coeffs.pop(key, None)
    return coeffs


@dataclass(frozen=True)
class ContactWitness:
    """The lowest-order derivative on which two systems disagree."""

    field_index: int
    component: int
    multi_index: MultiIndex
    lhs: Fraction
    rhs: Fraction

    def describe(self) -> str:
        return (
            f"D^{tuple(self.multi_index)} X{self.field_index}^{self.component + 1}(x0): "
            f"{self.lhs} != {self.rhs}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.field_index,
            "component": self.component + 1,
            "multi_index": list(self.multi_index),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass(frozen=True)
class ContactResult:
    """Outcome of a kth-contact check."""

    order: int
    has_contact: bool
    witness: Optional[ContactWitness] = None

    def __bool__(self) -> bool:
        return self.has_contact

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "has_contact": self.has_contact,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def kth_contact(
    X: ControlSystem, Y: ControlSystem, x0: Sequence[Any], k: int
) -> ContactResult:
    """
    Do X and Y share every derivative of order <= k of every field at x0?

    On failure the witness is the differing derivative of smallest order
    (ties broken by field index, then component, then graded-lex order of r).
    """
    require_valid(X)
    require_valid(Y)
    if not X.same_shape(Y):
        raise InputError(
            f"Systems differ in shape: '{X.name}' is (n={X.dim}, m={X.m}), "
            f"'{Y.name}' is (n={Y.dim}, m={Y.m})"
        )
    candidates = []
    for index, (vx, vy) in enumerate(zip(X.fields, Y.fields)):
        cx = taylor_coeffs(vx, x0, k)
        cy = taylor_coeffs(vy, x0, k)
        for key in set(cx) | set(cy):
            lhs = cx.get(key, Fraction(0))
            rhs = cy.get(key, Fraction(0))
            if lhs != rhs:
                component, r = key
                candidates.append((r.order, index, component, tuple(-e for e in r), r, lhs, rhs))
    if not candidates:
        return ContactResult(order=k, has_contact=True)
    _, index, component, _, r, lhs, rhs = min(candidates)
    return ContactResult(
        order=k,
        has_contact=False,
        witness=ContactWitness(index, component, r, lhs, rhs),
    )
