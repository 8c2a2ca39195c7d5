import math

import numpy as np
import pytest

from stlc_lab.chrono.compiled import compile_system, evaluate_poly_grid
from stlc_lab.chrono.integrator import flow_numeric, integrate_schedule
from stlc_lab.converters.text_to_system import parse_poly, parse_system
from stlc_lab.core.errors import BlowUpError, InputError
from stlc_lab.core.system import Schedule

RICCATI = "system riccati\ndim 1\ncontrols 0\nx0 = [1]\nX0 = [x1^2]\n"


def test_brockett_square_sweep(brockett):
    result = flow_numeric(brockett, Schedule.parse("(1,0):0.3;(0,1):0.2"))
    np.testing.assert_allclose(result.endpoint, [0.3, 0.2, 0.06], atol=1e-12)
    assert result.segment_ends[-1] == len(result.states) - 1


def test_exponential_growth(exp1d):
    result = flow_numeric(exp1d, Schedule.parse("():1"), step=1e-3)
    assert result.endpoint[0] == pytest.approx(math.e, abs=1e-9)


def test_record_keeps_every_step(double_integrator):
    schedule = Schedule.parse("(1):1/2;(-1):1/2")
    traced = flow_numeric(double_integrator, schedule, step=0.125, record=True)
    assert traced.steps == 8
    assert len(traced.times) == 9
    assert traced.times[-1] == pytest.approx(1.0)
    coarse = flow_numeric(double_integrator, schedule, step=0.125, record=False)
    assert len(coarse.times) == 3
    np.testing.assert_allclose(coarse.endpoint, traced.endpoint)
    np.testing.assert_allclose(coarse.endpoint, [0.0, 0.25], atol=1e-12)


def test_zero_duration_segments_are_skipped(brockett):
    result = flow_numeric(brockett, Schedule.parse("(1,0):0;(0,1):0.5"))
    np.testing.assert_allclose(result.endpoint, [0.0, 0.5, 0.0], atol=1e-12)


def test_blow_up_is_reported():
    sys = parse_system(RICCATI)
    with pytest.raises(BlowUpError) as info:
        flow_numeric(sys, Schedule.parse("():2"), step=1e-3, blowup_cap=1e6)
    assert info.value.segment == 0
    assert info.value.time == pytest.approx(1.0, abs=1e-2)


def test_integrator_rejects_bad_input(brockett):
    compiled = compile_system(brockett)
    with pytest.raises(InputError):
        integrate_schedule(compiled, [(1, 0)], [0.1], [0, 0, 0], step=0)
    with pytest.raises(InputError):
        integrate_schedule(compiled, [(1, 0)], [0.1, 0.2], [0, 0, 0])
    with pytest.raises(InputError):
        integrate_schedule(compiled, [(1, 0)], [0.1], [0, 0])
    with pytest.raises(InputError):
        integrate_schedule(compiled, [(1.5, 0)], [0.1], [0, 0, 0])


def test_compiled_field_matches_exact_field(brockett_cubic):
    compiled = compile_system(brockett_cubic)
    matrix = compiled.field_matrix([0.5, -1.0])
    x = np.array([0.3, -0.2, 0.7])
    expected = [
        0.5 * (x[1] ** 3 + 1),
        -(1 - x[0] ** 3),
        x[0] ** 3 - 0.5 * x[1] - x[0],
    ]
    np.testing.assert_allclose(compiled.rhs(matrix, x), expected)


def test_evaluate_poly_grid():
    poly = parse_poly("x1^2*x2 - 3", 2)
    points = np.array([[1.0, 2.0], [0.0, 0.0], [-2.0, 1.0]])
    np.testing.assert_allclose(evaluate_poly_grid(poly, points), [-1.0, -3.0, 1.0])
