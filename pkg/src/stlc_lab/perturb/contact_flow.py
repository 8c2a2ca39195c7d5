"""
Exact comparison of truncated flows of two systems along one schedule.

Systems with kth contact at x0 have identical order-k flow polynomials for
every piecewise-constant schedule; the comparison is coefficient by
coefficient in rational arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..chrono.expansion import CoefficientMismatch, exp_trunc_schedule
from ..core.errors import ContactFlowViolation, InputError
from ..core.system import ControlSystem
from ..core.taylor import ContactResult, kth_contact

logger = logging.getLogger(__name__)

DEFAULT_CONTROL_DENOMINATOR = 4


@dataclass
class ContactFlowResult:
    order: int
    segments: int
    equal: bool
    contact: ContactResult
    mismatch: Optional[CoefficientMismatch] = None

    @property
    def verdict(self) -> str:
        return "EXACT-EQUAL" if self.equal else "DIFFERENT"

    def describe(self) -> str:
        if self.equal:
            return self.verdict
        return f"{self.verdict}: {self.mismatch.describe()}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.order,
            "segments": self.segments,
            "verdict": self.verdict,
            "contact": self.contact.to_dict(),
            "mismatch": self.mismatch.to_dict() if self.mismatch else None,
        }


def random_rational_controls(
    m: int,
    p: int,
    seed: int,
    denominator: int = DEFAULT_CONTROL_DENOMINATOR,
    nonzero: bool = False,
) -> List[Tuple[Fraction, ...]]:
    """p controls in [-1, 1]^m with entries a / denominator."""
    rng = np.random.default_rng(seed)
    controls = []
    for _ in range(p):
        row = []
        for _ in range(m):
            numerator = int(rng.integers(-denominator, denominator + 1))
            while nonzero and numerator == 0:
                numerator = int(rng.integers(-denominator, denominator + 1))
            row.append(Fraction(numerator, denominator))
        controls.append(tuple(row))
    return controls


def contact_flow_identity(
    X: ControlSystem,
    Y: ControlSystem,
    x0: Sequence[Any],
    k: int,
    controls: Sequence[Sequence[Any]],
) -> ContactFlowResult:
    """
    Compare ev_{x0} exp_k of X and Y along ``controls``.

    Raises ``ContactFlowViolation`` if the systems have kth contact at x0 and
    the polynomials still differ.
    """
    if not X.same_shape(Y):
        raise InputError(
            f"Systems differ in shape: '{X.name}' is (n={X.dim}, m={X.m}), "
            f"'{Y.name}' is (n={Y.dim}, m={Y.m})"
        )
    contact = kth_contact(X, Y, x0, k)
    flow_x = exp_trunc_schedule(X, controls, k, x0)
    flow_y = exp_trunc_schedule(Y, controls, k, x0)
    mismatch = flow_x.first_difference(flow_y)
    if contact and mismatch is not None:
        raise ContactFlowViolation(
            f"'{X.name}' and '{Y.name}' have {k}th contact but their flows differ: "
            f"{mismatch.describe()}"
        )
    result = ContactFlowResult(
        order=k,
        segments=len(controls),
        equal=mismatch is None,
        contact=contact,
        mismatch=mismatch,
    )
    logger.debug("contact-flow k=%d p=%d: %s", k, len(controls), result.verdict)
    return result
