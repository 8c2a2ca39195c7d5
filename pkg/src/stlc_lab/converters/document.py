"""
Serializable carrier for a parsed control system.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..core.poly import PolyVectorField, as_rational
from ..core.system import ControlSystem
from .system_to_text import serialize
from .text_to_system import parse_poly, parse_system


class SystemDocument(BaseModel):
    """A control system as canonical text fragments."""

    name: str
    dim: int
    controls: int
    basepoint: Optional[List[str]] = None
    vector_fields: List[List[str]] = Field(default_factory=list)

    @classmethod
    def from_system(cls, sys: ControlSystem) -> SystemDocument:
        return cls(
            name=sys.name,
            dim=sys.dim,
            controls=sys.m,
            basepoint=None if sys.basepoint is None else [str(v) for v in sys.basepoint],
            vector_fields=[vf.to_text() for vf in sys.fields],
        )

    @classmethod
    def from_text(cls, text: str) -> SystemDocument:
        return cls.from_system(parse_system(text))

    def to_system(self) -> ControlSystem:
        return ControlSystem(
            name=self.name,
            dim=self.dim,
            m=self.controls,
            fields=tuple(
                PolyVectorField(tuple(parse_poly(comp, self.dim) for comp in field))
                for field in self.vector_fields
            ),
            basepoint=None
            if self.basepoint is None
            else tuple(as_rational(v) for v in self.basepoint),
        )

    def to_text(self) -> str:
        return serialize(self.to_system())

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()
