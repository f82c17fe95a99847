"""
Application configuration settings.

Centralized configuration for all services including:
- SPARQL endpoint client behaviour
- Pagination bounds for collection routes
- Conformance runner limits
- Logging
"""

import os
from typing import Final


# =====================================
# SPARQL Endpoint Configuration
# =====================================

SPARQL_TIMEOUT_SECONDS: Final[float] = float(os.getenv("SPARQL_TIMEOUT_SECONDS", "30"))
"""Maximum time to wait for a SPARQL endpoint response (seconds)"""

MAX_SPARQL_RETRIES: Final[int] = int(os.getenv("MAX_SPARQL_RETRIES", "2"))
"""Maximum number of retries for unreachable or failing endpoints"""

SPARQL_BACKOFF_SECONDS: Final[float] = float(os.getenv("SPARQL_BACKOFF_SECONDS", "0.5"))
"""Base delay for exponential backoff between retries (seconds)"""

EMBEDDED_ENDPOINT: Final[str] = "memory:"
"""Endpoint value selecting the in-process triple store"""


# =====================================
# Pagination Configuration
# =====================================

DEFAULT_PER_PAGE: Final[int] = int(os.getenv("DEFAULT_PER_PAGE", "100"))
"""Page size used when a collection request omits per_page"""

MAX_PER_PAGE: Final[int] = int(os.getenv("MAX_PER_PAGE", "200"))
"""Upper bound accepted for per_page"""


# =====================================
# Specification Defaults
# =====================================

API_TITLE: Final[str] = os.getenv("API_TITLE", "Ontology API")
"""Default info.title of generated specifications"""

API_VERSION: Final[str] = os.getenv("API_VERSION", "1.0.0")
"""Default info.version of generated specifications"""

OPENAPI_VERSION: Final[str] = "3.0.3"
"""OpenAPI version emitted by the compiler"""


# =====================================
# Server Configuration
# =====================================

DEFAULT_HOST: Final[str] = os.getenv("DEFAULT_HOST", "0.0.0.0")
"""Interface the gateway binds to"""

DEFAULT_PORT: Final[int] = int(os.getenv("DEFAULT_PORT", "8080"))
"""Port the gateway listens on"""


# =====================================
# Conformance Runner Configuration
# =====================================

CHECK_CONCURRENCY: Final[int] = int(os.getenv("CHECK_CONCURRENCY", "8"))
"""Maximum in-flight requests issued by the conformance runner"""

CHECK_TIMEOUT_SECONDS: Final[float] = float(os.getenv("CHECK_TIMEOUT_SECONDS", "60"))
"""Per-request timeout for the conformance runner (seconds)"""


# =====================================
# Logging Configuration
# =====================================

LOG_LEVEL: Final[str] = os.getenv("LOG_LEVEL", "INFO")
"""Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)"""

LOG_FORMAT: Final[str] = os.getenv("LOG_FORMAT", "json")
"""Log format (json or text)"""

LOG_BUFFER_SIZE: Final[int] = int(os.getenv("LOG_BUFFER_SIZE", "1000"))
"""Number of recent log entries kept in memory"""

