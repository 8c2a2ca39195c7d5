"""
Artifact writers for the command line: CSV tables, JSON reports and text.

Artifacts go to stdout or to ``--output``; they never carry timestamps, so
the same command line yields byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field


class ExperimentConfig(BaseModel):
    """Everything needed to rerun a command, echoed into every JSON report."""

    command: str
    inputs: List[str] = Field(default_factory=list)
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    settings: Dict[str, Any] = Field(default_factory=dict)
    output: Optional[str] = None


def plain(value: Any) -> Any:
    """Recursively convert report values into JSON-native types."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def _write(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        output.write_text(text, encoding="utf-8")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def render_json(config: ExperimentConfig, report: Dict[str, Any]) -> str:
    payload = {"config": plain(config.model_dump()), "report": plain(report)}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def emit_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], output: Optional[Path] = None) -> None:
    _write(render_csv(header, rows), output)


def emit_json(config: ExperimentConfig, report: Dict[str, Any], output: Optional[Path] = None) -> None:
    _write(render_json(config, report), output)


def emit_text(text: str, output: Optional[Path] = None) -> None:
    _write(text if text.endswith("\n") else text + "\n", output)
