from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlc_lab.core.errors import InputError
from stlc_lab.core.poly import (
    MultiIndex,
    Poly,
    PolyVectorField,
    as_rational,
    lie_bracket,
    lie_derivative,
    multi_indices,
)
from stlc_lab.core.random_systems import random_poly, random_system


def x(i: int, dim: int = 3) -> Poly:
    return Poly.variable(i - 1, dim)


def test_as_rational_reads_decimals_exactly():
    assert as_rational("0.1") == Fraction(1, 10)
    assert as_rational(0.1) == Fraction(1, 10)
    assert as_rational("3/6") == Fraction(1, 2)
    with pytest.raises(InputError):
        as_rational(float("nan"))
    with pytest.raises(InputError):
        as_rational("1/0")


def test_zero_coefficients_are_dropped():
    p = Poly(2, {(1, 0): 0, (0, 1): Fraction(1, 2), (0, 0): 0})
    assert p.terms == {(0, 1): Fraction(1, 2)}
    assert Poly.zero(2).degree == -1
    assert (x(1, 2) - x(1, 2)).is_zero()


def test_arithmetic_and_canonical_text():
    p = (x(1) + 1) ** 2 - x(3) * Fraction(3, 2)
    assert p.to_text() == "x1^2 + 2*x1 - 3/2*x3 + 1"
    assert (-x(2) ** 7 + x(3) ** 2).to_text() == "-x2^7 + x3^2"
    assert Poly.zero(3).to_text() == "0"


def test_dimension_mismatch_raises():
    with pytest.raises(InputError):
        x(1, 2) + x(1, 3)


def test_dpow_and_multi_index():
    p = x(1, 2) ** 3 * x(2, 2) ** 2
    assert p.dpow((2, 1)) == Poly(2, {(1, 1): 12})
    assert p.dpow((4, 0)).is_zero()
    r = MultiIndex((2, 1))
    assert r.order == 3
    assert r.factorial() == 2
    with pytest.raises(InputError):
        MultiIndex((1, -1))


def test_multi_indices_counts():
    # C(n + k, k) indices of order <= k in n variables
    assert len(list(multi_indices(3, 2))) == 10
    assert all(r.order <= 4 for r in multi_indices(2, 4))


def test_evaluate_exact_and_float():
    p = x(1, 2) * x(2, 2) + Fraction(1, 3)
    assert p.evaluate([Fraction(1, 2), 2]) == Fraction(4, 3)
    assert p.evaluate([0.5, 2.0]) == pytest.approx(4 / 3)


def test_lie_derivative_examples():
    brockett_x2 = PolyVectorField((Poly.zero(3), Poly.constant(1, 3), x(1)))
    brockett_x1 = PolyVectorField((Poly.constant(1, 3), Poly.zero(3), -x(2)))
    assert lie_derivative(brockett_x2, x(3)) == x(1)
    assert lie_derivative(brockett_x1, x(3)) == -x(2)


def test_brockett_bracket(brockett):
    _, X1, X2 = brockett.fields
    bracket = lie_bracket(X1, X2)
    assert bracket.components == (Poly.zero(3), Poly.zero(3), Poly.constant(2, 3))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_jacobi_identity(seed):
    V, W, Z = random_system(2, 2, 2, seed=seed).fields
    total = (
        lie_bracket(V, lie_bracket(W, Z))
        + lie_bracket(W, lie_bracket(Z, V))
        + lie_bracket(Z, lie_bracket(V, W))
    )
    assert total.is_zero()


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_lie_derivative_is_a_derivation(seed):
    rng = np.random.default_rng(seed)
    V = PolyVectorField(tuple(random_poly(2, 0, 2, rng) for _ in range(2)))
    f = random_poly(2, 0, 2, rng, density=1.0)
    g = random_poly(2, 0, 2, rng, density=1.0)
    assert lie_derivative(V, f * g) == f * lie_derivative(V, g) + g * lie_derivative(V, f)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    a=st.fractions(min_value=-3, max_value=3, max_denominator=5),
    b=st.fractions(min_value=-3, max_value=3, max_denominator=5),
)
def test_translate_shifts_the_argument(seed, a, b):
    p = random_poly(2, 0, 3, np.random.default_rng(seed), density=1.0)
    point = [Fraction(1, 2), Fraction(-2, 3)]
    assert p.translate([a, b]).evaluate(point) == p.evaluate([point[0] + a, point[1] + b])


def test_truncate_keeps_low_degree_terms():
    p = x(1, 2) ** 3 + x(1, 2) * x(2, 2) + x(2, 2) + 2
    assert p.truncate(2) == x(1, 2) * x(2, 2) + x(2, 2) + 2
    assert p.truncate(0) == Poly.constant(2, 2)
    assert p.truncate(-1).is_zero()
    assert p.truncate(5) is p


def test_integrate_inverts_derivative():
    p = x(1, 2) ** 2 * x(2, 2) + 3
    assert p.integrate(0).derivative(0) == p
    assert p.integrate(0).evaluate([0, 5]) == 0
