"""
Canonical ``.ctrl`` rendering of control systems.

Terms are written in graded-lex order with reduced ``a/b`` coefficients, so
``parse_system(serialize(sys)) == sys`` and serializing twice gives the same
text.
"""

from __future__ import annotations

from pathlib import Path
from typing import List

from ..core.system import ControlSystem, require_valid


def serialize(sys: ControlSystem) -> str:
    require_valid(sys)
    lines: List[str] = [f"system {sys.name}", f"dim {sys.dim}", f"controls {sys.m}"]
    if sys.basepoint is not None:
        lines.append("x0 = [" + ", ".join(str(v) for v in sys.basepoint) + "]")
    for index, vf in enumerate(sys.fields):
        lines.append(f"X{index} = [" + ", ".join(vf.to_text()) + "]")
    return "\n".join(lines) + "\n"


class SystemToTextConverter:
    """Writes ``.ctrl`` files."""

    def convert(self, sys: ControlSystem, path: Path) -> Path:
        path.write_text(serialize(sys), encoding="utf-8")
        return path
