"""
Authentication of gateway callers.

Callers are identified from the ``Authorization: Bearer <token>`` header.
Tokens are checked against the configured table (static-token mode) or a
custom validator passed to the application factory. Authenticated users
write to ``graph_base + username``; anonymous callers use the default graph.
"""

from typing import Callable, Optional

from config.gateway import AuthMode, GatewayConfig
from models.identity import UserIdentity
from services.resource_service import AuthenticationError
from utils.logger import log_warning

TokenValidator = Callable[[str], Optional[str]]
"""Maps a bearer token to a username, or None when the token is invalid"""

MUTATING_METHODS = frozenset({"POST", "PUT", "DELETE", "PATCH"})


def static_token_validator(tokens: dict) -> TokenValidator:
    """
    Validator looking tokens up in a token to username table.

    Examples:
        >>> validate = static_token_validator({"t1": "alice"})
        >>> validate("t1"), validate("nope")
        ('alice', None)
    """
    table = dict(tokens)
    return table.get


class Authenticator:
    """Resolves request headers into a UserIdentity."""

    def __init__(self, config: GatewayConfig, token_validator: Optional[TokenValidator] = None):
        """
        Initialize the authenticator.

        Args:
            config: Gateway configuration
            token_validator: Custom validator; replaces the static token table
        """
        self.config = config
        if token_validator is not None:
            self._validator: Optional[TokenValidator] = token_validator
        elif config.auth.mode is AuthMode.STATIC_TOKEN:
            self._validator = static_token_validator(config.auth.tokens)
        else:
            self._validator = None

    @property
    def enabled(self) -> bool:
        return self._validator is not None

    def authenticate(self, authorization: Optional[str], method: str) -> UserIdentity:
        """
        Identify the caller.

        Anonymous reads are always allowed; mutations need a valid token
        whenever authentication is enabled. A present but invalid token is
        rejected on any verb.

        Args:
            authorization: Authorization header value
            method: HTTP verb

        Returns:
            UserIdentity

        Raises:
            AuthenticationError: Missing identity on a mutation, or invalid token
        """
        anonymous = UserIdentity.anonymous(self.config.default_graph)
        if not self.enabled:
            return anonymous

        if not authorization:
            if method.upper() in MUTATING_METHODS:
                raise AuthenticationError("Authentication required")
            return anonymous

        scheme, _, token = authorization.partition(" ")
        token = token.strip()
        if scheme.lower() != "bearer" or not token:
            raise AuthenticationError("Expected 'Authorization: Bearer <token>'")

        username = self._validator(token)
        if not username:
            log_warning(message="Rejected bearer token", extra={"method": method.upper()})
            raise AuthenticationError("Invalid token")

        return UserIdentity.for_user(username, self.config.graph_base)
