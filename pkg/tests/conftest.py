from __future__ import annotations

from pathlib import Path

import pytest

from stlc_lab.converters.text_to_system import TextToSystemConverter, parse_system
from stlc_lab.core.system import ControlSystem
from stlc_lab.reach.steering import SteerOptions

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

LINE_TEXT = """\
system line
dim 1
controls 1
X0 = [0]
X1 = [1]
"""

LINE_SQUARE_TEXT = """\
system line_square
dim 1
controls 1
X0 = [x1^2]
X1 = [1]
"""


def load_corpus(name: str) -> ControlSystem:
    return TextToSystemConverter().convert(CORPUS / f"{name}.ctrl")


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep ~/.stlc-lab and STLC_LAB_* variables out of every test."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    for name in ("STLC_LAB_STEP", "STLC_LAB_BLOWUP_CAP", "STLC_LAB_JOBS", "STLC_LAB_DELTA", "STLC_LAB_MODE"):
        monkeypatch.delenv(name, raising=False)
    return home


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def brockett() -> ControlSystem:
    return load_corpus("brockett")


@pytest.fixture
def brockett_cubic() -> ControlSystem:
    return load_corpus("brockett_cubic")


@pytest.fixture
def exp1d() -> ControlSystem:
    return load_corpus("exp1d")


@pytest.fixture
def double_integrator() -> ControlSystem:
    return load_corpus("double_integrator")


@pytest.fixture
def example14() -> ControlSystem:
    return load_corpus("example14")


@pytest.fixture
def example14_perturbed() -> ControlSystem:
    return load_corpus("example14_perturbed")


@pytest.fixture
def line() -> ControlSystem:
    """x' = u on R."""
    return parse_system(LINE_TEXT)


@pytest.fixture
def line_square() -> ControlSystem:
    """x' = u + x^2: first-order contact with ``line`` at 0."""
    return parse_system(LINE_SQUARE_TEXT)


@pytest.fixture
def quick_steer() -> SteerOptions:
    """A small steering budget for unit tests."""
    return SteerOptions(segments=2, restarts=2, maxiter=400, warm_samples=32, step=1e-2)
