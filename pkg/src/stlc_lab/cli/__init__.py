"""
Command-line interface for stlc-lab.
"""

from .app import app

__all__ = ["app"]
