"""
Seeded generators for random polynomial systems and perturbations.

All coefficients are rationals in [-1, 1] with a bounded denominator, so the
generated systems stay inside exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError
from .poly import MultiIndex, Poly, PolyVectorField, as_rational, multi_indices
from .system import ControlSystem

DEFAULT_DENOMINATOR = 8


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_coefficient(rng: np.random.Generator, denominator: int) -> Fraction:
    numerator = 0
    while numerator == 0:
        numerator = int(rng.integers(-denominator, denominator + 1))
    return Fraction(numerator, denominator)


def random_poly(
    dim: int,
    min_degree: int,
    max_degree: int,
    rng: np.random.Generator,
    max_terms: int = 3,
    density: float = 0.7,
    denominator: int = DEFAULT_DENOMINATOR,
) -> Poly:
    """
    A sparse random polynomial whose monomials all have degree in
    ``[min_degree, max_degree]``. With probability ``1 - density`` the result
    is zero.
    """
    if min_degree < 0 or max_degree < min_degree:
        raise InputError(f"Invalid degree range [{min_degree}, {max_degree}]")
    if rng.random() >= density:
        return Poly.zero(dim)
    pool = [r for r in multi_indices(dim, max_degree) if r.order >= min_degree]
    count = int(rng.integers(1, max_terms + 1))
    chosen = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    return Poly(dim, {tuple(pool[i]): _random_coefficient(rng, denominator) for i in chosen})


def random_system(
    n: int,
    m: int,
    degree: int,
    seed: Optional[int] = None,
    max_terms: int = 3,
    density: float = 0.7,
) -> ControlSystem:
    """A random control system on R^n with m controls and fields of degree <= ``degree``."""
    rng = _rng(seed)
    fields = [
        PolyVectorField(tuple(random_poly(n, 0, degree, rng, max_terms, density) for _ in range(n)))
        for _ in range(m + 1)
    ]
    return ControlSystem(name=f"random_n{n}_m{m}_s{seed}", dim=n, m=m, fields=tuple(fields))


def random_perturbation(
    sys: ControlSystem,
    x0: Sequence[object],
    min_degree: int,
    max_degree: int,
    seed: Optional[int] = None,
    max_terms: int = 2,
) -> List[PolyVectorField]:
    """
    Perturbation fields whose monomials in (x - x0) all have degree in
    ``[min_degree, max_degree]``; adding them to ``sys`` preserves
    (min_degree - 1)th contact at x0.
    """
    rng = _rng(seed)
    shift = [-as_rational(v) for v in x0]
    extra = []
    for _ in sys.fields:
        comps = tuple(
            random_poly(sys.dim, min_degree, max_degree, rng, max_terms).translate(shift)
            for _ in range(sys.dim)
        )
        extra.append(PolyVectorField(comps))
    return extra


def perturbed_system(
    sys: ControlSystem,
    x0: Sequence[object],
    min_degree: int,
    max_degree: int,
    seed: Optional[int] = None,
) -> ControlSystem:
    extra = random_perturbation(sys, x0, min_degree, max_degree, seed)
    return sys.add_fields(extra, name=f"{sys.name}_perturbed")


def perturb_single_coefficient(
    sys: ControlSystem, x0: Sequence[object], order: int, seed: Optional[int] = None
) -> Tuple[ControlSystem, Tuple[int, int, MultiIndex]]:
    """
    Change exactly one Taylor coefficient of order <= ``order`` at x0.

    Returns the new system and ``(field_index, component, r)`` of the change.
    """
    rng = _rng(seed)
    field_index = int(rng.integers(0, len(sys.fields)))
    component = int(rng.integers(0, sys.dim))
    pool = list(multi_indices(sys.dim, order))
    r = pool[int(rng.integers(0, len(pool)))]
    bump = Poly(sys.dim, {tuple(r): _random_coefficient(rng, DEFAULT_DENOMINATOR)})
    bump = bump.translate([-as_rational(v) for v in x0])
    comps = list(sys.fields[field_index].components)
    comps[component] = comps[component] + bump
    fields = list(sys.fields)
    fields[field_index] = PolyVectorField(tuple(comps))
    return sys.with_fields(fields, name=f"{sys.name}_bumped"), (field_index, component, r)
