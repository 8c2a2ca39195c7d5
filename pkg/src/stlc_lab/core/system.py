"""
Control-system data model.

A control system is a family of polynomial vector fields X_0 (drift) and
X_1..X_m (control fields) on R^n with controls in the box [-1, 1]^m. Other
control boxes must be handled by rescaling the control fields beforehand.

Schedules store piecewise-constant controls in chronological (execution)
order: ``segments[0]`` runs first. Wherever a flow is composed from segment
exponentials, the first segment's operator is the outermost one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .errors import InputError
from .poly import PolyVectorField, as_rational

Number = Union[int, float, Fraction]


class IssueType(Enum):
    """Severity of a validation issue."""
    CRITICAL = "critical"
    WARNING = "warning"


@dataclass
class ValidationIssue:
    """A single problem found while validating a system."""

    issue_type: IssueType
    category: str
    description: str
    field_index: Optional[int] = None


@dataclass
class ValidationResult:
    """Outcome of ``validate``; diagnostics are returned, never raised."""

    passed: bool
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def critical_issues(self) -> List[ValidationIssue]:
        return [i for i in self.issues if i.issue_type == IssueType.CRITICAL]

    @property
    def summary(self) -> str:
        if self.passed:
            return "ok"
        return "; ".join(issue.description for issue in self.critical_issues)


@dataclass(frozen=True)
class ControlSystem:
    """
    A polynomial control system on R^n.

    ``fields[0]`` is the drift X_0 and ``fields[i]`` is the control field X_i.
    The constructor does not enforce the shape invariants so that ``validate``
    can report them; operations call ``require_valid`` first.
    """

    name: str
    dim: int
    m: int
    fields: Tuple[PolyVectorField, ...]
    basepoint: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", tuple(self.fields))
        if self.basepoint is not None:
            object.__setattr__(
                self, "basepoint", tuple(as_rational(v) for v in self.basepoint)
            )

    @property
    def origin(self) -> Tuple[Fraction, ...]:
        """The basepoint x0, defaulting to the origin of R^n."""
        if self.basepoint is not None:
            return self.basepoint
        return tuple(Fraction(0) for _ in range(self.dim))

    @property
    def drift(self) -> PolyVectorField:
        return self.fields[0]

    @property
    def degree(self) -> int:
        return max(f.degree for f in self.fields)

    def with_fields(self, fields: Sequence[PolyVectorField], name: Optional[str] = None) -> ControlSystem:
        return ControlSystem(
            name=name or self.name,
            dim=self.dim,
            m=self.m,
            fields=tuple(fields),
            basepoint=self.basepoint,
        )

    def add_fields(self, extra: Sequence[PolyVectorField], name: Optional[str] = None) -> ControlSystem:
        """Y = X + extra, field by field."""
        if len(extra) != len(self.fields):
            raise InputError(
                f"Expected {len(self.fields)} perturbation fields, got {len(extra)}"
            )
        return self.with_fields([a + b for a, b in zip(self.fields, extra)], name)

    def same_shape(self, other: ControlSystem) -> bool:
        return self.dim == other.dim and self.m == other.m and len(self.fields) == len(other.fields)


def validate(sys: ControlSystem) -> ValidationResult:
    """Check the shape invariants of ``sys`` and return structured diagnostics."""
    issues: List[ValidationIssue] = []

    def critical(category: str, description: str, index: Optional[int] = None) -> None:
        issues.append(ValidationIssue(IssueType.CRITICAL, category, description, index))

    if not isinstance(sys.dim, int) or sys.dim < 1:
        critical("shape", f"dim must be a positive integer, got {sys.dim!r}")
    if not isinstance(sys.m, int) or sys.m < 0:
        critical("shape", f"controls must be a non-negative integer, got {sys.m!r}")
    elif len(sys.fields) != sys.m + 1:
        critical(
            "shape",
            f"expected m+1 fields ({sys.m + 1}) for m={sys.m}, got {len(sys.fields)}",
        )
    for index, vf in enumerate(sys.fields):
        if not isinstance(vf, PolyVectorField):
            critical("field", f"X{index} is not a polynomial vector field", index)
        elif vf.dim != sys.dim:
            critical(
                "field",
                f"X{index} has dimension {vf.dim}, expected {sys.dim}",
                index,
            )
    if sys.basepoint is not None and len(sys.basepoint) != sys.dim:
        critical(
            "basepoint",
            f"x0 has {len(sys.basepoint)} coordinates, expected {sys.dim}",
        )
    if not sys.name:
        issues.append(ValidationIssue(IssueType.WARNING, "name", "system has no name"))

    return ValidationResult(passed=not any(i.issue_type == IssueType.CRITICAL for i in issues), issues=issues)


def require_valid(sys: ControlSystem) -> None:
    result = validate(sys)
    if not result.passed:
        raise InputError(f"Invalid control system '{sys.name}': {result.summary}")


def check_control(u: Sequence[Number], m: int) -> None:
    if len(u) != m:
        raise InputError(f"Control has {len(u)} components, system has m={m}")
    for index, value in enumerate(u):
        if not -1 <= value <= 1:
            raise InputError(f"Control component u{index + 1}={value} outside [-1, 1]")


def control_vf(
    sys: ControlSystem, u: Sequence[Number], max_denominator: Optional[int] = None
) -> PolyVectorField:
    """
    X_u = X_0 + sum_i u_i X_i with exact rational coefficients.

    Float controls are read as finite decimals, or rounded to a rational with
    denominator at most ``max_denominator`` when given.
    """
    require_valid(sys)
    check_control(u, sys.m)
    result = sys.fields[0]
    for value, vf in zip(u, sys.fields[1:]):
        weight = as_rational(value, max_denominator)
        if weight:
            result = result + vf.scale(weight)
    return result


@dataclass(frozen=True)
class Segment:
    """One piece of a schedule: a constant control held for ``duration``."""

    control: Tuple[Number, ...]
    duration: Number

    def __post_init__(self) -> None:
        object.__setattr__(self, "control", tuple(self.control))
        for index, value in enumerate(self.control):
            if not -1 <= value <= 1:
                raise InputError(f"Control component u{index + 1}={value} outside [-1, 1]")
        if self.duration < 0:
            raise InputError(f"Segment duration must be non-negative, got {self.duration}")


_SEGMENT_RE = re.compile(r"^\(\s*([^()]*)\s*\)\s*:\s*(\S+)$")


@dataclass(frozen=True)
class Schedule:
    """A chronological list of constant-control segments."""

    segments: Tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[Sequence[Number], Number]]) -> Schedule:
        return cls(tuple(Segment(tuple(u), s) for u, s in pairs))

    @classmethod
    def parse(cls, literal: str) -> Schedule:
        """
        Parse the CLI literal ``"(1,0):0.1;(0,1):0.2"``.

        Numbers are read exactly (decimals and ``a/b`` rationals).
        """
        pairs = []
        for chunk in literal.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            match = _SEGMENT_RE.match(chunk)
            if not match:
                raise InputError(f"Malformed schedule segment {chunk!r}; expected '(u1,...,um):duration'")
            controls_text, duration_text = match.groups()
            controls = [as_rational(v) for v in controls_text.split(",") if v.strip()]
            pairs.append((controls, as_rational(duration_text)))
        if pairs and len({len(u) for u, _ in pairs}) != 1:
            raise InputError("All schedule segments must have the same number of controls")
        return cls.from_pairs(pairs)

    @property
    def controls(self) -> List[Tuple[Number, ...]]:
        return [seg.control for seg in self.segments]

    @property
    def durations(self) -> List[Number]:
        return [seg.duration for seg in self.segments]

    @property
    def total(self) -> Number:
        """|t|, the sum of the durations."""
        return sum(self.durations, 0)

    def __len__(self) -> int:
        return len(self.segments)

    def reversed(self) -> Schedule:
        return Schedule(tuple(reversed(self.segments)))

    def concat(self, other: Schedule) -> Schedule:
        return Schedule(self.segments + other.segments)

    def scaled(self, factor: Number) -> Schedule:
        return Schedule(tuple(Segment(seg.control, seg.duration * factor) for seg in self.segments))

    def to_literal(self) -> str:
        def fmt(value: Number) -> str:
            return repr(value) if isinstance(value, float) else str(value)

        return ";".join(
            "(" + ",".join(fmt(v) for v in seg.control) + "):" + fmt(seg.duration)
            for seg in self.segments
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "controls": [[float(v) for v in seg.control] for seg in self.segments],
            "durations": [float(seg.duration) for seg in self.segments],
        }
