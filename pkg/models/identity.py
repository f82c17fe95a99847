"""
Caller identity model.
"""

from typing import Dict, Optional


class UserIdentity:
    """
    Identity of the caller of a gateway request.

    Attributes:
        username: Authenticated user name (None for anonymous callers)
        graph: Named graph the caller writes to
    """

    def __init__(self, username: Optional[str], graph: str):
        """
        Initialize UserIdentity instance.

        Args:
            username: User name, None when anonymous
            graph: Named graph IRI
        """
        if not graph:
            raise ValueError("Identity needs a named graph")
        self.username = username
        self.graph = graph

    @classmethod
    def anonymous(cls, default_graph: str) -> "UserIdentity":
        """Anonymous identity bound to the default graph."""
        return cls(username=None, graph=default_graph)

    @classmethod
    def for_user(cls, username: str, graph_base: str) -> "UserIdentity":
        """
        Identity of a named user; the graph is graph_base + username.

        Examples:
            >>> UserIdentity.for_user("alice", "https://ex.org/graphs/").graph
            'https://ex.org/graphs/alice'
        """
        if not username:
            raise ValueError("Username cannot be empty")
        return cls(username=username, graph=graph_base + username)

    def to_dict(self) -> Dict[str, Optional[str]]:
        return {"username": self.username, "graph": self.graph}

    def __repr__(self) -> str:
        return f"UserIdentity(username={self.username!r}, graph='{self.graph}')"

    def __eq__(self, other) -> bool:
        if not isinstance(other, UserIdentity):
            return False
        return self.username == other.username and self.graph == other.graph
