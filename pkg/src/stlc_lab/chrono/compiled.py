"""
Float (numpy) views of exact polynomial objects for fast repeated evaluation.
"""

from __future__ import annotations

from functools import lru_cache
from typing import List, Sequence

import numpy as np

from ..core.poly import Exponents, Poly
from ..core.system import ControlSystem, check_control, require_valid


def evaluate_poly_grid(poly: Poly, points: np.ndarray) -> np.ndarray:
    """Evaluate ``poly`` at every row of ``points`` (shape ``(N, dim)``)."""
    if poly.is_zero():
        return np.zeros(points.shape[0])
    exps = np.array(list(poly.terms.keys()), dtype=np.int64)
    coeffs = np.array([float(c) for c in poly.terms.values()])
    monomials = np.prod(points[:, None, :] ** exps[None, :, :], axis=2)
    return monomials @ coeffs


class CompiledSystem:
    """
    Coefficient tensors of a control system over a shared monomial basis.

    ``coefficients[i, j, q]`` is the coefficient of monomial ``q`` in
    component ``j`` of field X_i, so X_u = coefficients[0] + u @ coefficients[1:].
    """

    def __init__(self, sys: ControlSystem):
        require_valid(sys)
        self.name = sys.name
        self.dim = sys.dim
        self.m = sys.m
        basis: List[Exponents] = sorted(
            {exps for vf in sys.fields for comp in vf.components for exps in comp.terms}
        )
        index = {exps: q for q, exps in enumerate(basis)}
        self.exponents = np.array(basis, dtype=np.int64).reshape(len(basis), sys.dim)
        self.coefficients = np.zeros((sys.m + 1, sys.dim, len(basis)))
        for i, vf in enumerate(sys.fields):
            for j, comp in enumerate(vf.components):
                for exps, coeff in comp.terms.items():
                    self.coefficients[i, j, index[exps]] = float(coeff)

    def field_matrix(self, u: Sequence[float]) -> np.ndarray:
        """Coefficient matrix of X_u, shape ``(dim, K)``."""
        check_control(u, self.m)
        matrix = self.coefficients[0].copy()
        if self.m:
            matrix += np.tensordot(np.asarray(u, dtype=float), self.coefficients[1:], axes=1)
        return matrix

    def rhs(self, matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
        monomials = np.prod(x[None, :] ** self.exponents, axis=1)
        return matrix @ monomials


@lru_cache(maxsize=64)
def compile_system(sys: ControlSystem) -> CompiledSystem:
    return CompiledSystem(sys)
