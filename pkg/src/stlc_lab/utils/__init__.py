"""
Utility helpers: logging setup and deterministic parallel maps.
"""

from .logging import setup_logging
from .parallel import derive_seed, ordered_map, task_rng

__all__ = ["setup_logging", "derive_seed", "ordered_map", "task_rng"]
