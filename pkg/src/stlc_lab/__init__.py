"""
stlc-lab - exact chronological expansions and reachability experiments for
polynomial control systems.
"""

__version__ = "0.1.0"
