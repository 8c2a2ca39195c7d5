"""
Text format for control systems: parser, canonical serializer and document model.
"""

from .document import SystemDocument
from .system_to_text import SystemToTextConverter, serialize
from .text_to_system import TextToSystemConverter, parse_poly, parse_system

__all__ = [
    "SystemDocument",
    "SystemToTextConverter",
    "serialize",
    "TextToSystemConverter",
    "parse_poly",
    "parse_system",
]
