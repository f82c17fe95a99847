"""
Utility functions for ontogate.

This package provides common utilities including:
- Structured logging
- IRI naming helpers (local names, pluralization)
- Input validation (IRI guard, literal escaping, JSON Schema checks)
- The embedded SPARQL store
"""

from .logger import log_info, log_warning, log_error, log_query, get_logs, clear_logs
from .naming import local_name, pluralize, is_absolute_iri
from .validator import validate_iri, escape_literal, validate_instance
from .triplestore import EmbeddedStore

__all__ = [
    "log_info",
    "log_warning",
    "log_error",
    "log_query",
    "get_logs",
    "clear_logs",
    "local_name",
    "pluralize",
    "is_absolute_iri",
    "validate_iri",
    "escape_literal",
    "validate_instance",
    "EmbeddedStore",
]

__version__ = "1.0.0"
