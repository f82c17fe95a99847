"""
Gateway configuration.

The gateway reads a YAML file whose keys mirror GatewayConfig. Any value
can be overridden from the environment with the ``ONTOGATE_`` prefix and
``__`` as nested delimiter (e.g. ``ONTOGATE_ENDPOINT__QUERY``), or from a
``.env`` file.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from config.settings import DEFAULT_HOST, DEFAULT_PORT, EMBEDDED_ENDPOINT
from utils.validator import validate_iri


class ConfigError(Exception):
    """Exception for invalid gateway configuration."""

    def __init__(self, keys: Sequence[str], message: str):
        self.keys = list(keys)
        listed = f" [{', '.join(self.keys)}]" if self.keys else ""
        super().__init__(f"Invalid configuration{listed}: {message}")


class AuthMode(str, Enum):
    """Authentication mode enumeration."""
    NONE = "none"
    STATIC_TOKEN = "static-token"


class ReadScope(str, Enum):
    """Graphs visible to read requests."""
    ALL_GRAPHS = "all-graphs"
    OWN_GRAPH = "own-graph"


class EndpointSettings(BaseModel):
    """SPARQL endpoint URLs; ``memory:`` selects the embedded store."""

    model_config = ConfigDict(extra="forbid")

    query: str
    update: Optional[str] = None
    seed: List[str] = Field(default_factory=list)

    @field_validator("query", "update")
    @classmethod
    def _check_url(cls, value: Optional[str]) -> Optional[str]:
        if value is None or value == EMBEDDED_ENDPOINT:
            return value
        if not value.startswith(("http://", "https://")):
            raise ValueError(f"expected an http(s) URL or '{EMBEDDED_ENDPOINT}'")
        return value

    @property
    def update_url(self) -> str:
        return self.update or self.query

    @property
    def is_embedded(self) -> bool:
        return self.query == EMBEDDED_ENDPOINT


class AuthSettings(BaseModel):
    """Authentication settings."""

    model_config = ConfigDict(extra="forbid")

    mode: AuthMode = AuthMode.NONE
    tokens: Dict[str, str] = Field(default_factory=dict)


class GatewayConfig(BaseSettings):
    """
    Gateway configuration.

    Attributes:
        endpoint: Query/update URLs and embedded store seed files
        instance_prefix: Namespace of API-created resources
        graph_base: Prefix of per-user named graphs
        default_graph: Graph of anonymous callers
        auth: Authentication mode and token table
        read_scope: all-graphs or own-graph
        custom_queries: Directory of custom ``.rq`` queries
        port: Listening port
        host: Listening interface
        artifacts: Directory holding openapi.yaml, context.jsonld, paths.map, templates/
    """

    model_config = SettingsConfigDict(
        env_prefix="ONTOGATE_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="forbid",
    )

    endpoint: EndpointSettings
    instance_prefix: str
    graph_base: str
    default_graph: str
    auth: AuthSettings = Field(default_factory=AuthSettings)
    read_scope: ReadScope = ReadScope.ALL_GRAPHS
    custom_queries: Optional[str] = None
    port: int = Field(default=DEFAULT_PORT, ge=1, le=65535)
    host: str = DEFAULT_HOST
    artifacts: Optional[str] = None

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # Environment overrides the YAML file, which is passed as init values
        return env_settings, dotenv_settings, init_settings, file_secret_settings

    @field_validator("instance_prefix", "graph_base")
    @classmethod
    def _check_prefix(cls, value: str) -> str:
        ok, reason = validate_iri(value)
        if not ok:
            raise ValueError(reason)
        if not value.endswith(("/", "#")):
            raise ValueError("must end with '/' or '#'")
        return value

    @field_validator("default_graph")
    @classmethod
    def _check_graph(cls, value: str) -> str:
        ok, reason = validate_iri(value)
        if not ok:
            raise ValueError(reason)
        return value

    @model_validator(mode="after")
    def _check_tokens(self) -> "GatewayConfig":
        if self.auth.mode is AuthMode.STATIC_TOKEN:
            if not self.auth.tokens:
                raise ValueError("auth.tokens: static-token mode needs at least one token")
            for username in self.auth.tokens.values():
                ok, _ = validate_iri(self.graph_base + username)
                if not username or not ok:
                    raise ValueError(f"auth.tokens: username {username!r} cannot name a graph")
        return self


def _error_keys(error: ValidationError) -> List[str]:
    keys = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item.get("loc", ()))
        if not loc:
            message = str(item.get("msg", ""))
            loc = message.split(":", 1)[0].replace("Value error, ", "") if ":" in message else ""
        if loc and loc not in keys:
            keys.append(loc)
    return keys


def _resolve(base: Path, value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    path = Path(value)
    return str(path if path.is_absolute() else (base / path).resolve())


def build_gateway_config(data: Dict[str, Any], base_dir: Union[str, Path] = ".") -> GatewayConfig:
    """
    Validate configuration values and resolve relative paths.

    Args:
        data: Parsed configuration mapping
        base_dir: Directory relative paths are resolved against

    Returns:
        GatewayConfig

    Raises:
        ConfigError: Listing the dotted keys at fault
    """
    try:
        config = GatewayConfig(**data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in item.get('loc', ())) or 'config'}: {item.get('msg')}"
            for item in e.errors()
        )
        raise ConfigError(_error_keys(e), details)

    base = Path(base_dir).resolve()
    endpoint = config.endpoint.model_copy(
        update={"seed": [_resolve(base, seed) for seed in config.endpoint.seed]}
    )
    return config.model_copy(
        update={
            "endpoint": endpoint,
            "custom_queries": _resolve(base, config.custom_queries),
            "artifacts": _resolve(base, config.artifacts) or str(base),
        }
    )


def load_gateway_config(path: Union[str, Path]) -> GatewayConfig:
    """
    Load the gateway configuration from a YAML file.

    Relative paths (seed files, custom query and artifact directories) are
    resolved against the file's directory; ``artifacts`` defaults to it.

    Args:
        path: YAML file path

    Returns:
        GatewayConfig

    Raises:
        ConfigError: If the file is unreadable, not a mapping or invalid

    Examples:
        >>> config = load_gateway_config("deploy/gateway.yaml")
        >>> config.read_scope
        <ReadScope.ALL_GRAPHS: 'all-graphs'>
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError([], f"cannot read {path}: {e.strerror or e}")
    except yaml.YAMLError as e:
        raise ConfigError([], f"{path} is not valid YAML: {e}")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError([], f"{path} must contain a mapping")

    return build_gateway_config(data, path.parent)
