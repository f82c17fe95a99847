"""
SPARQL Protocol client.

Talks to the knowledge graph endpoint over HTTP with:
- CONSTRUCT queries (Turtle, N-Triples or JSON-LD results)
- SPARQL updates
- Read scoping through the ``default-graph-uri`` parameter
- Retry logic with exponential backoff for transient failures
"""

import asyncio
import time
from typing import Dict, Optional

import httpx
from rdflib import Graph

from config.settings import MAX_SPARQL_RETRIES, SPARQL_BACKOFF_SECONDS, SPARQL_TIMEOUT_SECONDS
from utils.logger import log_error, log_query

CONSTRUCT_ACCEPT = "text/turtle, application/n-triples;q=0.9, application/ld+json;q=0.8"

_RESULT_FORMATS: Dict[str, str] = {
    "text/turtle": "turtle",
    "application/x-turtle": "turtle",
    "application/n-triples": "nt",
    "text/plain": "nt",
    "application/ld+json": "json-ld",
    "application/json": "json-ld",
    "application/rdf+xml": "xml",
}


class SparqlError(Exception):
    """Base exception for SPARQL endpoint errors."""
    pass


class SparqlEndpointError(SparqlError):
    """Exception for unreachable, failing or timed-out endpoints."""
    pass


class SparqlQueryError(SparqlError):
    """Exception for requests the endpoint rejected."""

    def __init__(self, status: int, message: str):
        self.status = status
        super().__init__(f"Endpoint rejected request (HTTP {status}): {message}")


class SparqlClient:
    """
    Async SPARQL Protocol client shared by all requests.

    Examples:
        >>> client = SparqlClient("https://kg.example.org/sparql")
        >>> graph = await client.construct("CONSTRUCT WHERE { ?s ?p ?o } LIMIT 1")
        >>> await client.close()
    """

    def __init__(
        self,
        query_url: str,
        update_url: Optional[str] = None,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        timeout: float = SPARQL_TIMEOUT_SECONDS,
        max_retries: int = MAX_SPARQL_RETRIES,
        backoff_seconds: float = SPARQL_BACKOFF_SECONDS
    ):
        """
        Initialize the client.

        Args:
            query_url: Query endpoint URL
            update_url: Update endpoint URL (defaults to query_url)
            transport: Custom httpx transport (e.g. the embedded store)
            timeout: Per-request timeout in seconds
            max_retries: Retries after the first failed attempt
            backoff_seconds: Base delay of the exponential backoff
        """
        self.query_url = query_url
        self.update_url = update_url or query_url
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self._client = httpx.AsyncClient(transport=transport, timeout=timeout)

    async def construct(
        self,
        query: str,
        default_graph: Optional[str] = None,
        kind: str = "construct",
        route: str = ""
    ) -> Graph:
        """
        Run a CONSTRUCT query and parse the resulting graph.

        Args:
            query: SPARQL CONSTRUCT query
            default_graph: Restrict the default graph to this named graph
            kind: Template kind, for logging
            route: API route, for logging

        Returns:
            rdflib Graph of the result

        Raises:
            SparqlEndpointError: If the endpoint is unreachable or fails
            SparqlQueryError: If the endpoint rejects the query
        """
        params = {"default-graph-uri": default_graph} if default_graph else None
        started = time.perf_counter()
        response = await self._send(
            self.query_url,
            content=query,
            content_type="application/sparql-query",
            accept=CONSTRUCT_ACCEPT,
            params=params,
        )

        media_type = response.headers.get("content-type", "text/turtle").split(";", 1)[0].strip().lower()
        result_format = _RESULT_FORMATS.get(media_type)
        if result_format is None:
            raise SparqlEndpointError(f"Unsupported CONSTRUCT result type {media_type!r}")

        graph = Graph()
        try:
            graph.parse(data=response.text, format=result_format)
        except Exception as e:  # parser-specific exception types
            raise SparqlEndpointError(f"Cannot parse {media_type} result: {e}")

        log_query(
            kind=kind,
            route=route,
            duration_seconds=time.perf_counter() - started,
            graphs=[default_graph] if default_graph else None,
            triples=len(graph),
        )
        return graph

    async def update(self, update: str, kind: str = "update", route: str = ""):
        """
        Run a SPARQL update.

        Raises:
            SparqlEndpointError: If the endpoint is unreachable or fails
            SparqlQueryError: If the endpoint rejects the update
        """
        started = time.perf_counter()
        await self._send(
            self.update_url,
            content=update,
            content_type="application/sparql-update",
            accept="*/*",
        )
        log_query(kind=kind, route=route, duration_seconds=time.perf_counter() - started)

    async def _send(
        self,
        url: str,
        content: str,
        content_type: str,
        accept: str,
        params: Optional[Dict[str, str]] = None
    ) -> httpx.Response:
        """POST with retry and exponential backoff on transport errors and 5xx."""
        attempt = 0
        while True:
            try:
                response = await self._client.post(
                    url,
                    content=content.encode("utf-8"),
                    headers={"Content-Type": f"{content_type}; charset=utf-8", "Accept": accept},
                    params=params,
                )
            except httpx.TransportError as e:
                failure: Exception = SparqlEndpointError(f"Endpoint unreachable: {type(e).__name__}: {e}")
            else:
                if response.status_code < 400:
                    return response
                if response.status_code < 500:
                    raise SparqlQueryError(response.status_code, response.text[:500])
                failure = SparqlEndpointError(f"Endpoint failed with HTTP {response.status_code}")

            will_retry = attempt < self.max_retries
            log_error(
                error_message=f"SPARQL request failed (attempt {attempt + 1}/{self.max_retries + 1})",
                error_type=type(failure).__name__,
                extra={"url": url, "reason": str(failure), "will_retry": will_retry},
            )
            if not will_retry:
                raise failure

            await asyncio.sleep(self.backoff_seconds * (2 ** attempt))
            attempt += 1

    async def close(self):
        """Close the underlying HTTP client."""
        await self._client.aclose()
