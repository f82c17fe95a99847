"""
Configuration for ontogate.

- settings: environment constants (timeouts, pagination, logging)
- gateway: the YAML gateway configuration model
"""

from .settings import (
    SPARQL_TIMEOUT_SECONDS,
    MAX_SPARQL_RETRIES,
    DEFAULT_PER_PAGE,
    MAX_PER_PAGE,
    CHECK_CONCURRENCY,
    DEFAULT_PORT,
    LOG_LEVEL,
)
from .gateway import AuthMode, ConfigError, GatewayConfig, ReadScope, load_gateway_config

__all__ = [
    "SPARQL_TIMEOUT_SECONDS",
    "MAX_SPARQL_RETRIES",
    "DEFAULT_PER_PAGE",
    "MAX_PER_PAGE",
    "CHECK_CONCURRENCY",
    "DEFAULT_PORT",
    "LOG_LEVEL",
    "AuthMode",
    "ConfigError",
    "GatewayConfig",
    "ReadScope",
    "load_gateway_config",
]

__version__ = "1.0.0"
