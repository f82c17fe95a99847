"""
Command line entry points for ontogate.
"""

from .commands import cli

__all__ = ["cli"]

__version__ = "1.0.0"
