import numpy as np
import pytest

from stlc_lab.core.errors import InputError
from stlc_lab.reach.growth import ball_coverage, calibrate_growth_constant, growth_rate_test
from stlc_lab.reach.sampler import (
    ReachSample,
    SamplingMode,
    axis_directions,
    direction_label,
    draw_schedule,
    random_directions,
    sample_reachable,
    unit_directions,
)
from stlc_lab.reach.steering import ScheduleCodec, SteerOptions, steer_to
from stlc_lab.utils.parallel import derive_seed, ordered_map, task_rng


def test_sample_starts_at_the_basepoint(double_integrator):
    sample = sample_reachable(double_integrator, [0, 0], 0.5, 50, 3, seed=1)
    assert len(sample) == 51
    np.testing.assert_array_equal(sample.endpoints[0], [0.0, 0.0])
    assert all(float(s.total) < 0.5 for s in sample.schedules)
    assert all(len(s) == 3 for s in sample.schedules)
    assert sample.dropped == 0
    assert sample.csv_header() == ["idx", "x_1", "x_2", "schedule"]


def test_sample_is_independent_of_jobs(double_integrator):
    serial = sample_reachable(double_integrator, [0, 0], 0.5, 40, 2, seed=9, jobs=1)
    threaded = sample_reachable(double_integrator, [0, 0], 0.5, 40, 2, seed=9, jobs=4)
    np.testing.assert_array_equal(serial.endpoints, threaded.endpoints)
    assert serial.csv_rows() == threaded.csv_rows()


def test_uniform_mode_stays_in_the_box(brockett):
    sample = sample_reachable(brockett, [0, 0, 0], 0.3, 30, 2, seed=4, mode="uniform")
    assert sample.mode is SamplingMode.UNIFORM
    for schedule in sample.schedules:
        for u in schedule.controls:
            assert all(-1 <= v <= 1 for v in u)


def test_draw_schedule_is_bang_bang():
    schedule = draw_schedule(task_rng(3, 0), 2, 4, 1.0)
    assert all(v in (-1, 0, 1) for u in schedule.controls for v in u)
    assert 0 < schedule.total < 1.0


def test_sampler_rejects_bad_arguments(brockett):
    with pytest.raises(InputError):
        sample_reachable(brockett, [0, 0, 0], 0.0, 10, 2, seed=1)
    with pytest.raises(InputError):
        sample_reachable(brockett, [0, 0, 0], 0.5, 0, 2, seed=1)
    with pytest.raises(InputError):
        sample_reachable(brockett, [0, 0], 0.5, 10, 2, seed=1)


def test_sample_extend(double_integrator):
    a = sample_reachable(double_integrator, [0, 0], 0.5, 5, 2, seed=1)
    b = sample_reachable(double_integrator, [0, 0], 0.5, 5, 2, seed=2)
    merged = a.extend(b)
    assert len(merged) == 12
    with pytest.raises(InputError):
        a.extend(sample_reachable(double_integrator, [0, 0], 0.4, 5, 2, seed=2))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_unit_directions_are_unit(n):
    dirs = unit_directions(n, 16, seed=2)
    assert dirs.shape == (16, n)
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0)


def test_direction_helpers():
    axes = axis_directions(3)
    assert axes.shape == (6, 3)
    assert direction_label(axes[5]) == "-e3"
    assert direction_label([0.6, 0.8]) == "[0.6, 0.8]"
    np.testing.assert_array_equal(random_directions(4, 3, 8), random_directions(4, 3, 8))


def test_parallel_helpers():
    assert ordered_map(lambda v: v * v, [3, 1, 2], jobs=3) == [9, 1, 4]
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert derive_seed(5, 1) != derive_seed(5, 2)


def test_schedule_codec_respects_the_horizon():
    codec = ScheduleCodec(m=2, p=3, t=0.5, duration_scale=0.99)
    assert codec.size == 10
    rng = np.random.default_rng(0)
    for _ in range(20):
        schedule = codec.schedule(rng.normal(size=codec.size) * 3)
        assert float(schedule.total) < 0.5
        assert all(-1 <= v <= 1 for u in schedule.controls for v in u)


def test_steering_reaches_a_reachable_point(double_integrator, quick_steer):
    result = steer_to(double_integrator, [0, 0], [0.2, 0.02], 1.0, seed=3, options=quick_steer)
    assert result.distance < 1e-3
    assert float(result.schedule.total) < 1.0
    assert result.evaluations > 0


def test_steering_never_raises_on_unreachable_targets(line, quick_steer):
    result = steer_to(line, [0], [5.0], 0.5, seed=3, options=quick_steer)
    assert result.distance >= 4.5


def test_ball_coverage_edge_cases(line):
    sample = sample_reachable(line, [0], 0.5, 20, 2, seed=1)
    assert ball_coverage(sample, [0], 0.0, 8).coverage == 1.0
    far = ball_coverage(sample, [0], 10.0, np.array([[1.0], [-1.0]]))
    assert far.coverage == 0.0
    assert far.uncovered == [0, 1]
    empty = ReachSample(np.zeros(1), 0.5, np.zeros((0, 1)), [], 2, 1, 0)
    with pytest.raises(InputError):
        ball_coverage(empty, [0], 1.0, 2)


def test_growth_passes_for_the_line(line, quick_steer):
    report = growth_rate_test(
        line, [0], 1, 0.5, [0.4, 0.2, 0.1], seed=5, samples=200, directions=2, steer=quick_steer
    )
    assert report.passed
    assert report.verdict == "pass"
    assert [row.radius for row in report.rows] == pytest.approx([0.2, 0.1, 0.05])
    assert report.coverage_at(0.2) == 1.0


def test_growth_fails_beyond_the_reachable_set(line, quick_steer):
    report = growth_rate_test(
        line, [0], 1, 2.0, [0.4, 0.2], seed=5, samples=100, directions=2, steer=quick_steer
    )
    assert not report.passed
    assert report.verdict == "not found under budget"
    assert all(row.coverage == 0.0 for row in report.rows)


def test_growth_rejects_bad_orders(line):
    with pytest.raises(InputError):
        growth_rate_test(line, [0], 0, 1.0, [0.1], seed=1)


def test_growth_rejects_times_outside_the_horizon(line):
    with pytest.raises(InputError, match="horizon"):
        growth_rate_test(line, [0], 1, 0.5, [0.4, 0.2], seed=1, horizon=0.3)
    with pytest.raises(InputError, match="positive"):
        growth_rate_test(line, [0], 1, 0.5, [0.2, 0.0], seed=1)
    with pytest.raises(InputError):
        growth_rate_test(line, [0], 1, 0.5, [], seed=1)


def test_growth_records_the_horizon(line, quick_steer):
    report = growth_rate_test(
        line,
        [0],
        1,
        0.5,
        [0.4, 0.2, 0.1],
        seed=5,
        samples=200,
        directions=2,
        steer=quick_steer,
        horizon=0.4,
    )
    assert report.passed
    assert report.to_dict()["T"] == 0.4


def test_calibration_on_the_line(line):
    report = calibrate_growth_constant(line, [0], 1, 0.5, 500, 2, seed=3, directions=2)
    assert 0.3 < report.constant <= 0.5 * 0.99
    assert not report.diagnostics


@pytest.mark.slow
def test_brockett_growth_rate_acceptance(brockett):
    calibration = calibrate_growth_constant(brockett, [0, 0, 0], 2, 0.5, 100000, 4, seed=7)
    C = calibration.constant
    assert C > 0
    times = [0.5, 0.25, 0.125]
    second = growth_rate_test(brockett, [0, 0, 0], 2, C, times, seed=7)
    assert second.passed
    first = growth_rate_test(brockett, [0, 0, 0], 1, C, times, seed=7)
    assert first.coverage_at(0.125) < 0.5
