"""
Exception types shared across stlc-lab.

Input problems are raised as ``InputError`` (a ``ValueError``) so callers that
only know about built-in exceptions still catch them. The CLI maps every
``InputError`` to exit status 2.
"""

from __future__ import annotations

from typing import Optional


class StlcLabError(Exception):
    """Base class for all stlc-lab errors."""


class InputError(StlcLabError, ValueError):
    """Invalid shapes, dimensions, ranges or limits supplied by the caller."""


class ParseError(InputError):
    """Syntax or semantic error in a system document or polynomial literal."""

    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class BlowUpError(StlcLabError, RuntimeError):
    """The integrated state left the configured norm cap."""

    def __init__(self, segment: int, time: float, norm: Optional[float] = None):
        self.segment = segment
        self.time = time
        self.norm = norm
        detail = f"state norm {norm:.3g}" if norm is not None else "non-finite state"
        super().__init__(
            f"Integration blew up in segment {segment} at t={time:.6g} ({detail})"
        )


class ContactFlowViolation(StlcLabError, AssertionError):
    """Systems with kth contact produced different truncated flows."""
