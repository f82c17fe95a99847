"""
HTTP gateway for ontogate.

This package provides:
- The FastAPI application factory mounting the compiled routes
- The uvicorn server lifecycle
"""

from .app import create_app
from .server import serve

__all__ = [
    "create_app",
    "serve",
]

__version__ = "1.0.0"
