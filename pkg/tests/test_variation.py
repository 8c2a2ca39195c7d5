import pytest

from stlc_lab.core.errors import InputError
from stlc_lab.reach.variation import lemma_consistency, order_scan, variation_check

TIMES = [0.4, 0.2, 0.1]


def test_linear_variation_on_the_line(line, quick_steer):
    report = variation_check(line, [0], [1.0], 1, 0.5, TIMES, seed=2, floor=0.09, steer=quick_steer)
    assert report.passed
    assert report.verdict == "pass"
    assert report.label == "+e1"
    assert report.target_distances == pytest.approx([0.2, 0.1, 0.05])
    assert [row[0] for row in report.csv_rows()] == TIMES


def test_unreachable_variation_is_not_found(line, quick_steer):
    report = variation_check(line, [0], [-1.0], 1, 2.0, TIMES, seed=2, steer=quick_steer)
    assert not report.within_tolerance
    assert report.verdict == "not found under budget"
    assert report.to_dict()["passed"] is False


def test_variation_rejects_bad_arguments(line):
    with pytest.raises(InputError):
        variation_check(line, [0], [0.5], 1, 0.5, TIMES, seed=1)
    with pytest.raises(InputError):
        variation_check(line, [0], [1.0], 0, 0.5, TIMES, seed=1)
    with pytest.raises(InputError):
        variation_check(line, [0], [1.0], 1, -0.5, TIMES, seed=1)
    with pytest.raises(InputError):
        variation_check(line, [0], [1.0], 1, 0.5, [], seed=1)


def test_order_scan_stops_at_the_first_pass(line, quick_steer):
    result = order_scan(line, [0], [-1.0], 3, TIMES, seed=4, c=0.5, floor=0.09, steer=quick_steer)
    assert result.order == 1
    assert len(result.reports) == 1
    assert result.label == "-e1"


def test_lemma_consistency_on_the_line(line, quick_steer):
    report = lemma_consistency(
        line, [0], 1, 0.5, TIMES, seed=6, directions=2, floor=0.09, steer=quick_steer
    )
    assert report.passed
    assert report.failures == []


@pytest.mark.slow
@pytest.mark.parametrize(
    "v, k, expected",
    [
        ([1.0, 0.0, 0.0], 1, True),
        ([0.0, 0.0, 1.0], 1, False),
        ([0.0, 0.0, 1.0], 2, True),
    ],
)
def test_brockett_variations(brockett, v, k, expected):
    report = variation_check(brockett, [0, 0, 0], v, k, 0.05, TIMES, seed=7)
    assert report.passed is expected


@pytest.mark.slow
def test_brockett_order_scan(brockett):
    assert order_scan(brockett, [0, 0, 0], [1.0, 0.0, 0.0], 3, TIMES, seed=7).order == 1
    assert order_scan(brockett, [0, 0, 0], [0.0, 0.0, 1.0], 3, TIMES, seed=7).order == 2
