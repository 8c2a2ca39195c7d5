import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlc_lab.core.errors import InputError
from stlc_lab.core.poly import MultiIndex, Poly, PolyVectorField
from stlc_lab.core.random_systems import perturb_single_coefficient, perturbed_system, random_system
from stlc_lab.core.taylor import kth_contact, taylor_coeffs


def test_taylor_coeffs_of_a_square():
    V = PolyVectorField((Poly.monomial((2,)),))
    coeffs = taylor_coeffs(V, [3], 2)
    assert coeffs == {
        (0, MultiIndex((0,))): 9,
        (0, MultiIndex((1,))): 6,
        (0, MultiIndex((2,))): 2,
    }


def test_taylor_coeffs_are_sparse_at_the_origin():
    V = PolyVectorField((Poly.monomial((5, 0)), Poly.monomial((1, 1))))
    coeffs = taylor_coeffs(V, [0, 0], 3)
    assert coeffs == {(1, MultiIndex((1, 1))): 1}
    assert taylor_coeffs(V, [0, 0], 5)[(0, MultiIndex((5, 0)))] == 120


def test_taylor_coeffs_rejects_bad_input():
    V = PolyVectorField((Poly.monomial((1,)),))
    with pytest.raises(InputError):
        taylor_coeffs(V, [0, 0], 1)
    with pytest.raises(InputError):
        taylor_coeffs(V, [0], -1)


def test_cubic_brockett_contact(brockett, brockett_cubic):
    assert kth_contact(brockett, brockett_cubic, [0, 0, 0], 2)
    result = kth_contact(brockett, brockett_cubic, [0, 0, 0], 3)
    assert not result
    assert result.witness.multi_index.order == 3
    assert "!=" in result.witness.describe()


def test_cubic_brockett_contact_away_from_origin(brockett, brockett_cubic):
    assert not kth_contact(brockett, brockett_cubic, [1, 0, 0], 0)


def test_example_pair_has_contact_of_order_57(example14, example14_perturbed):
    origin = [0, 0, 0, 0]
    assert kth_contact(example14, example14_perturbed, origin, 57)
    result = kth_contact(example14, example14_perturbed, origin, 58)
    assert not result
    witness = result.witness
    assert (witness.field_index, witness.component) == (0, 0)
    assert tuple(witness.multi_index) == (58, 0, 0, 0)
    assert (witness.lhs, witness.rhs) == (0, math.factorial(58))


def test_shape_mismatch(brockett, double_integrator):
    with pytest.raises(InputError):
        kth_contact(brockett, double_integrator, [0, 0, 0], 1)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    k=st.integers(min_value=0, max_value=3),
)
def test_contact_is_reflexive(seed, k):
    sys = random_system(2, 1, 3, seed=seed)
    assert kth_contact(sys, sys, [Fraction(1, 2), -1], k)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    order=st.integers(min_value=0, max_value=3),
)
def test_single_coefficient_bump_is_the_witness(seed, order):
    sys = random_system(2, 1, 2, seed=seed)
    x0 = [Fraction(1, 3), 0]
    bumped, (field_index, component, r) = perturb_single_coefficient(sys, x0, order, seed=seed)
    result = kth_contact(sys, bumped, x0, order)
    assert not result
    assert result.witness.field_index == field_index
    assert result.witness.component == component
    assert result.witness.multi_index == r
    if r.order > 0:
        assert kth_contact(sys, bumped, x0, r.order - 1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_high_degree_perturbation_keeps_contact(seed):
    sys = random_system(2, 1, 2, seed=seed)
    x0 = [1, Fraction(-1, 2)]
    perturbed = perturbed_system(sys, x0, 3, 4, seed=seed)
    assert kth_contact(sys, perturbed, x0, 2)
