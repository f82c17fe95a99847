"""
Structured logging utilities for ontogate.

Provides logging with:
- Structured JSON entries on standard error
- Query and resource-change tracking
- Request logging for the gateway
- An in-memory buffer of recent entries
"""

import json
import logging
import sys
from collections import deque
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from config.settings import LOG_BUFFER_SIZE, LOG_FORMAT, LOG_LEVEL


class LogLevel(Enum):
    """Log level enumeration."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class _JsonFormatter(logging.Formatter):
    """Render the structured entry attached to a record as one JSON line."""

    def format(self, record: logging.LogRecord) -> str:
        entry = getattr(record, "structured", None)
        if entry is None:
            entry = {"level": record.levelname, "message": record.getMessage()}
        if LOG_FORMAT == "text":
            extra = entry.get("extra")
            suffix = f" {json.dumps(extra, default=str, sort_keys=True)}" if extra else ""
            return f"{entry.get('timestamp', '')} {entry['level']} {entry['message']}{suffix}"
        return json.dumps(entry, default=str, sort_keys=True)


class StructuredLogger:
    """
    Structured logger for gateway and compiler operations.

    Entries carry a timestamp, a level, a message, an optional request id
    and a context dictionary. They are emitted through the ``ontogate``
    stdlib logger and kept in a bounded buffer.
    """

    def __init__(self, name: str = "ontogate", buffer_size: int = LOG_BUFFER_SIZE):
        """Initialize structured logger."""
        self.logs: deque = deque(maxlen=buffer_size)
        self._logger = logging.getLogger(name)
        if not self._logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(_JsonFormatter())
            self._logger.addHandler(handler)
            self._logger.propagate = False
        self._logger.setLevel(LOG_LEVEL.upper())

    def _format_log(
        self,
        level: LogLevel,
        message: str,
        request_id: Optional[str] = None,
        extra: Optional[Dict[str, Any]] = None
    ) -> Dict[str, Any]:
        """
        Format log entry with structured data.

        Args:
            level: Log level
            message: Log message
            request_id: Request identifier
            extra: Additional context data

        Returns:
            Formatted log entry
        """
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": level.value,
            "message": message,
        }

        if request_id:
            log_entry["request_id"] = request_id

        if extra:
            log_entry["extra"] = extra

        return log_entry

    def log(
        self,
        level: LogLevel,
        message: str,
        request_id: Optional[str] = None,
        extra: Optional[Dict[str, Any]] = None
    ):
        """
        Log message with structured format.

        Args:
            level: Log level
            message: Log message
            request_id: Request identifier
            extra: Additional context
        """
        log_entry = self._format_log(level, message, request_id, extra)
        self.logs.append(log_entry)
        self._logger.log(
            logging.getLevelName(level.value),
            message,
            extra={"structured": log_entry},
        )

    def set_level(self, level: str):
        """Change the emitting threshold (buffering is unaffected)."""
        self._logger.setLevel(level.upper())


# Global logger instance
_logger = StructuredLogger()


def configure_logging(level: Optional[str] = None):
    """
    Adjust the global logger, typically from the CLI.

    Args:
        level: Logging level name; defaults to LOG_LEVEL
    """
    _logger.set_level(level or LOG_LEVEL)


def log_query(
    kind: str,
    route: str,
    duration_seconds: float,
    graphs: Optional[List[str]] = None,
    triples: Optional[int] = None,
    request_id: Optional[str] = None
):
    """
    Log an executed SPARQL operation.

    Args:
        kind: Template kind (get-all, get-by-id, insert, update, delete, custom)
        route: API route the operation serves
        duration_seconds: Round-trip time against the endpoint
        graphs: Named graphs the operation was scoped to (None = union)
        triples: Number of triples returned, when known
        request_id: Related request identifier

    Examples:
        >>> log_query("get-by-id", "/regions/{id}", 0.012, graphs=None, triples=7)
    """
    context: Dict[str, Any] = {
        "kind": kind,
        "route": route,
        "duration_ms": round(duration_seconds * 1000, 2),
        "scope": graphs if graphs else "union",
    }

    if triples is not None:
        context["triples"] = triples

    _logger.log(
        LogLevel.DEBUG,
        f"SPARQL {kind} for {route}",
        request_id=request_id,
        extra=context
    )


def log_resource_change(
    action: str,
    resource_iri: str,
    graph: str,
    username: Optional[str] = None,
    request_id: Optional[str] = None
):
    """
    Log a write against the knowledge graph for audit trail.

    Args:
        action: Change kind (insert, update, delete)
        resource_iri: Resource subject IRI
        graph: Named graph written to
        username: Authenticated user, if any
        request_id: Related request identifier
    """
    context = {
        "action": action,
        "resource": resource_iri,
        "graph": graph,
    }

    if username:
        context["user"] = username

    _logger.log(
        LogLevel.INFO,
        f"Resource {action}: {resource_iri}",
        request_id=request_id,
        extra=context
    )


def log_request(
    method: str,
    path: str,
    status: int,
    duration_seconds: float,
    request_id: Optional[str] = None
):
    """
    Log a handled HTTP request.

    Args:
        method: HTTP verb
        path: Request path
        status: Response status code
        duration_seconds: Handling time
        request_id: Request identifier
    """
    level = LogLevel.ERROR if status >= 500 else LogLevel.INFO
    _logger.log(
        level,
        f"{method} {path} -> {status}",
        request_id=request_id,
        extra={
            "method": method,
            "path": path,
            "status": status,
            "duration_ms": round(duration_seconds * 1000, 2),
        }
    )


def log_error(
    error_message: str,
    error_type: Optional[str] = None,
    request_id: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None
):
    """
    Log error with context.

    Args:
        error_message: Error description
        error_type: Error type/category
        request_id: Related request identifier
        extra: Additional error context

    Examples:
        >>> log_error(
        ...     error_message="SPARQL endpoint timeout",
        ...     error_type="SparqlEndpointError",
        ... )
    """
    context = {}

    if error_type:
        context["error_type"] = error_type

    if extra:
        context.update(extra)

    _logger.log(
        LogLevel.ERROR,
        error_message,
        request_id=request_id,
        extra=context if context else None
    )


def log_info(
    message: str,
    request_id: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None
):
    """
    Log informational message.

    Args:
        message: Log message
        request_id: Related request identifier
        extra: Additional context
    """
    _logger.log(
        LogLevel.INFO,
        message,
        request_id=request_id,
        extra=extra
    )


def log_debug(
    message: str,
    extra: Optional[Dict[str, Any]] = None
):
    """Log debug message."""
    _logger.log(LogLevel.DEBUG, message, extra=extra)


def log_warning(
    message: str,
    request_id: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None
):
    """
    Log warning message.

    Args:
        message: Warning message
        request_id: Related request identifier
        extra: Additional context
    """
    _logger.log(
        LogLevel.WARNING,
        message,
        request_id=request_id,
        extra=extra
    )


def get_logs() -> list:
    """
    Retrieve buffered log entries.

    Returns:
        List of log entries, oldest first
    """
    return list(_logger.logs)


def clear_logs():
    """Clear all buffered entries (for testing)."""
    _logger.logs.clear()
