from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlc_lab.converters.text_to_system import parse_system
from stlc_lab.core.errors import ContactFlowViolation, InputError
from stlc_lab.core.random_systems import perturb_single_coefficient, perturbed_system, random_system
from stlc_lab.core.system import Schedule
from stlc_lab.perturb.contact_flow import contact_flow_identity, random_rational_controls
from stlc_lab.perturb.experiments import (
    ball_targets,
    example_directions_experiment,
    main_theorem_experiment,
    perturb_scaling_experiment,
    perturbation_map,
    replay,
    require_contact,
    selection_continuity,
)

ORIGIN3 = [0, 0, 0]


def test_random_rational_controls():
    controls = random_rational_controls(2, 3, seed=5)
    assert controls == random_rational_controls(2, 3, seed=5)
    assert len(controls) == 3
    assert all(-1 <= v <= 1 and v.denominator in (1, 2, 4) for u in controls for v in u)
    assert all(v != 0 for u in random_rational_controls(2, 6, seed=1, nonzero=True) for v in u)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cubic_brockett_flows_agree_up_to_order_three(brockett, brockett_cubic, k):
    controls = random_rational_controls(2, 2, seed=7)
    result = contact_flow_identity(brockett, brockett_cubic, ORIGIN3, k, controls)
    assert result.equal
    assert result.verdict == "EXACT-EQUAL"


def test_cubic_brockett_flows_differ_at_order_four(brockett, brockett_cubic):
    controls = random_rational_controls(2, 2, seed=7, nonzero=True)
    result = contact_flow_identity(brockett, brockett_cubic, ORIGIN3, 4, controls)
    assert not result.equal
    assert not result.contact
    assert result.verdict == "DIFFERENT"
    assert sum(result.mismatch.monomial) == 4
    assert result.describe().startswith("DIFFERENT: x")


def test_example_pair_flows_agree(example14, example14_perturbed):
    controls = random_rational_controls(1, 2, seed=3)
    result = contact_flow_identity(example14, example14_perturbed, [0, 0, 0, 0], 4, controls)
    assert result.equal
    assert result.contact


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n=st.integers(min_value=1, max_value=3),
    m=st.integers(min_value=1, max_value=2),
    degree=st.integers(min_value=1, max_value=3),
    k=st.integers(min_value=0, max_value=4),
    p=st.integers(min_value=1, max_value=3),
)
def test_contact_implies_equal_flows(seed, n, m, degree, k, p):
    sys = random_system(n, m, degree, seed=seed)
    x0 = [Fraction(1, 2)] + [Fraction(-1, 3)] * (n - 1)
    other = perturbed_system(sys, x0, k + 1, k + 2, seed=seed)
    controls = random_rational_controls(m, p, seed)
    result = contact_flow_identity(sys, other, x0, k, controls)
    assert result.contact
    assert result.equal


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_changing_a_field_value_changes_the_first_order_flow(seed):
    sys = random_system(2, 1, 2, seed=seed, density=1.0)
    x0 = [0, Fraction(1, 3)]
    bumped, _ = perturb_single_coefficient(sys, x0, 0, seed=seed)
    controls = random_rational_controls(1, 2, seed, nonzero=True)
    assert not contact_flow_identity(sys, bumped, x0, 1, controls).equal


@pytest.mark.parametrize("k", [1, 2, 3])
def test_breaking_contact_changes_the_flow(k):
    x0 = [0, Fraction(1, 3)]
    detected = 0
    for trial in range(20):
        seed = 1000 * k + trial
        sys = random_system(2, 1, 2, seed=seed, density=1.0)
        bumped, _ = perturb_single_coefficient(sys, x0, k - 1, seed=seed)
        controls = random_rational_controls(1, 2, seed, nonzero=True)
        result = contact_flow_identity(sys, bumped, x0, k, controls)
        assert not result.contact
        detected += not result.equal
    assert detected >= 18


def test_first_derivative_change_appears_at_order_two(double_integrator):
    bumped = parse_system(
        "system bumped\ndim 2\ncontrols 1\nX0 = [x1, x1]\nX1 = [1, 0]\n"
    )
    controls = [(Fraction(1, 2),), (Fraction(-1, 4),)]
    assert contact_flow_identity(double_integrator, bumped, [0, 0], 1, controls).equal
    result = contact_flow_identity(double_integrator, bumped, [0, 0], 2, controls)
    assert not result.equal
    assert result.mismatch.coordinate == 0


def test_contact_flow_rejects_shape_mismatch(brockett, double_integrator):
    with pytest.raises(InputError):
        contact_flow_identity(brockett, double_integrator, ORIGIN3, 1, [(0, 0)])


def test_violation_type_is_an_assertion():
    assert issubclass(ContactFlowViolation, AssertionError)


def test_ball_targets_stay_in_the_ball():
    points = ball_targets([1.0, -1.0], 0.3, 50, seed=2)
    assert points.shape == (50, 2)
    assert np.all(np.linalg.norm(points - np.array([1.0, -1.0]), axis=1) <= 0.3 + 1e-12)
    np.testing.assert_array_equal(points, ball_targets([1.0, -1.0], 0.3, 50, seed=2))


def test_replay_of_one_schedule(line, line_square):
    x, y = replay(line, line_square, Schedule.parse("(1):1/2"), [0])
    assert x[0] == pytest.approx(0.5)
    # y' = 1 + y^2 gives y = tan(t)
    assert y[0] == pytest.approx(np.tan(0.5), abs=1e-6)


def test_perturbation_map(line, line_square, quick_steer):
    result = perturbation_map(
        line, line_square, [0], [0.1], 0.4, seed=3, options=quick_steer, threshold=1e-2
    )
    assert result.steer_residual < 1e-2
    assert not result.flagged
    assert 0 <= result.distance < 0.1
    assert result.to_dict()["replay_dist"] == result.distance


def test_perturbation_map_requires_matching_shapes(line, brockett):
    with pytest.raises(InputError):
        perturbation_map(line, brockett, [0], [0.1], 0.4, seed=3)


def test_require_contact(line, line_square):
    require_contact(line, line_square, [0], 1)
    with pytest.raises(InputError):
        require_contact(line, line_square, [0], 2)


def test_scaling_experiment_structure(line, line_square, quick_steer):
    report = perturb_scaling_experiment(
        line, line_square, [0], 1, 0.5, [0.4, 0.2], 3, seed=1, options=quick_steer
    )
    assert len(report.rows) == 6
    assert len(report.max_distance) == 2
    assert report.csv_rows()[0][:2] == [0.4, 0]
    if not report.degenerate:
        assert report.exponent is not None
        assert report.alpha_bound >= 0


def test_scaling_experiment_needs_contact(line, line_square):
    with pytest.raises(InputError):
        perturb_scaling_experiment(line, line_square, [0], 2, 0.5, [0.4], 2, seed=1)


def test_main_theorem_on_the_line(line, line_square, quick_steer):
    report = main_theorem_experiment(
        line, line_square, [0], 1, 0.5, [0.4, 0.2, 0.1], seed=2,
        samples=200, directions=2, steer=quick_steer,
    )
    assert report.constant == 0.25
    assert report.passed


def test_selection_continuity(line, line_square, quick_steer):
    report = selection_continuity(
        line, line_square, [0], [0.05], [0.1], 3, 0.4, seed=1, options=quick_steer
    )
    assert len(report.targets) == 3
    assert report.targets[-1] == pytest.approx([0.1])
    assert report.max_jump_ratio >= 0


def test_directions_experiment_on_the_line(line, line_square, quick_steer):
    report = example_directions_experiment(
        line, line_square, [0], 1, [0.4, 0.2], seed=3,
        contact_orders=(1, 2), c=0.5, options=quick_steer, floor=0.09,
    )
    assert report.contact_orders == {1: True, 2: False}
    assert [scan.order for scan in report.x_scans] == [1, 1]
    assert report.matches
    assert report.csv_rows()[0][0] == "+e1"


@pytest.mark.slow
def test_brockett_perturbation_scaling_acceptance(brockett):
    cubic = perturbed_system(brockett, ORIGIN3, 3, 3, seed=11)
    report = perturb_scaling_experiment(
        brockett, cubic, ORIGIN3, 2, 0.02, [0.4, 0.2, 0.1, 0.05], 20, seed=7
    )
    assert not report.degenerate
    assert report.exponent >= 2.7


@pytest.mark.slow
def test_example_directions_survive_the_high_order_perturbation(example14, example14_perturbed):
    report = example_directions_experiment(
        example14, example14_perturbed, [0, 0, 0, 0], 10, [0.4, 0.2, 0.1], seed=7,
        contact_orders=(57, 58),
    )
    assert report.contact_orders == {57: True, 58: False}
    found = {scan.label: scan.order for scan in report.x_scans}
    assert found["+e1"] is not None
    assert found["-e1"] is not None
    assert report.matches
