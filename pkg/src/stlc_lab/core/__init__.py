"""
Core algebra and data model: exact polynomials, vector fields, control systems.
"""

from .errors import BlowUpError, ContactFlowViolation, InputError, ParseError, StlcLabError
from .poly import MultiIndex, Poly, PolyVectorField, lie_bracket, lie_derivative
from .system import ControlSystem, Schedule, Segment, control_vf, validate
from .taylor import ContactResult, kth_contact, taylor_coeffs

__all__ = [
    "StlcLabError",
    "InputError",
    "ParseError",
    "BlowUpError",
    "ContactFlowViolation",
    "MultiIndex",
    "Poly",
    "PolyVectorField",
    "lie_bracket",
    "lie_derivative",
    "ControlSystem",
    "Schedule",
    "Segment",
    "control_vf",
    "validate",
    "ContactResult",
    "kth_contact",
    "taylor_coeffs",
]
