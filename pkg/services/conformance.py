"""
GET conformance runner.

Requests every GET route of a compiled specification against a running
gateway and validates the responses against the route's schema. Item
routes are checked with the first valid resource listed by their collection.
"""

import asyncio
from dataclasses import dataclass
from typing import Any, Dict, List, Optional
from urllib.parse import quote

import httpx

from config.settings import CHECK_CONCURRENCY, CHECK_TIMEOUT_SECONDS
from models.api_spec import ApiSpecDocument, OperationSpec, ResponseArity
from models.report import CheckStatus, ConformanceReport, RouteResult
from models.resource import ID_KEYWORD
from utils.logger import log_info, log_warning
from utils.validator import validate_instance


class ConformanceError(Exception):
    """Base exception for conformance runs."""
    pass


class ServerUnreachableError(ConformanceError):
    """Exception for a gateway that cannot be connected to."""

    def __init__(self, base_url: str, reason: str):
        self.base_url = base_url
        super().__init__(f"Cannot reach {base_url}: {reason}")


@dataclass(frozen=True)
class _Fetched:
    url: str
    status: Optional[int]
    data: Any = None
    error: Optional[str] = None


class ConformanceRunner:
    """
    Runs the GET checks of one specification against one server.

    Examples:
        >>> runner = ConformanceRunner("http://localhost:8080", document)
        >>> report = await runner.run()
        >>> report.failed
        False
    """

    def __init__(
        self,
        base_url: str,
        document: ApiSpecDocument,
        transport: Optional[httpx.AsyncBaseTransport] = None,
        concurrency: int = CHECK_CONCURRENCY,
        timeout: float = CHECK_TIMEOUT_SECONDS
    ):
        """
        Initialize the runner.

        Args:
            base_url: Gateway base URL
            document: Compiled specification
            transport: Custom httpx transport (e.g. an ASGI app)
            concurrency: Maximum in-flight requests
            timeout: Per-request timeout in seconds
        """
        self.base_url = base_url.rstrip("/")
        self.document = document
        self.transport = transport
        self.timeout = timeout
        self.concurrency = max(1, concurrency)
        self._semaphore: Optional[asyncio.Semaphore] = None
        self._components = {name: schema.to_openapi() for name, schema in document.schemas.items()}
        self._collections: Dict[str, "asyncio.Task[_Fetched]"] = {}
        self._client: Optional[httpx.AsyncClient] = None

    async def run(self) -> ConformanceReport:
        """
        Check every GET route.

        Returns:
            ConformanceReport with one entry per GET route

        Raises:
            ServerUnreachableError: If the server refuses connections
        """
        routes = [
            (route, item.operations["get"])
            for route, item in sorted(self.document.paths.items())
            if "get" in item.operations
        ]

        self._semaphore = asyncio.Semaphore(self.concurrency)
        async with httpx.AsyncClient(transport=self.transport, timeout=self.timeout) as client:
            self._client = client
            try:
                outcomes = await asyncio.gather(
                    *(self._check(route, op) for route, op in routes), return_exceptions=True
                )
            finally:
                for task in self._collections.values():
                    if not task.done():
                        task.cancel()
                self._client = None
                self._collections.clear()

        errors = [o for o in outcomes if isinstance(o, BaseException)]
        if errors:
            raise errors[0]

        report = ConformanceReport(outcomes)
        log_info(message="Conformance run finished", extra=report.totals())
        return report

    async def _get(self, path: str) -> _Fetched:
        url = self.base_url + path
        async with self._semaphore:
            try:
                response = await self._client.get(url)
            except httpx.ConnectError as e:
                raise ServerUnreachableError(self.base_url, str(e) or type(e).__name__)
            except httpx.TransportError as e:
                return _Fetched(url=url, status=None, error=f"{type(e).__name__}: {e}")

        if response.status_code != 200:
            return _Fetched(url=url, status=response.status_code, error=f"HTTP {response.status_code}")
        try:
            return _Fetched(url=url, status=200, data=response.json())
        except ValueError:
            return _Fetched(url=url, status=200, error="response is not JSON")

    def _collection(self, route: str) -> "asyncio.Task[_Fetched]":
        task = self._collections.get(route)
        if task is None:
            task = self._collections[route] = asyncio.ensure_future(self._get(route))
        return task

    async def _check(self, route: str, operation: OperationSpec) -> RouteResult:
        if operation.required_query_parameters():
            return RouteResult(
                route,
                CheckStatus.SKIP_PARAMS,
                "requires " + ", ".join(operation.required_query_parameters()),
            )

        if "{id}" not in route:
            return self._validate(route, operation, await self._collection(route))

        collection_route = route.split("/{id}", 1)[0]
        listed = await self._collection(collection_route)
        if listed.error is not None:
            return RouteResult(route, CheckStatus.FAIL_HTTP, f"collection {listed.error}", url=listed.url)

        if not isinstance(listed.data, list):
            return RouteResult(route, CheckStatus.SKIP_EMPTY, "collection response is not an array", url=listed.url)
        if not listed.data:
            return RouteResult(route, CheckStatus.SKIP_EMPTY, "collection is empty", url=listed.url)

        # invalid elements are already reported by the collection route
        first_id = self._first_valid_id(listed.data, operation)
        if first_id is None:
            return RouteResult(route, CheckStatus.SKIP_EMPTY, "no valid resource in collection", url=listed.url)

        fetched = await self._get(route.replace("{id}", quote(first_id, safe="")))
        return self._validate(route, operation, fetched)

    def _first_valid_id(self, elements: List[Any], operation: OperationSpec) -> Optional[str]:
        for element in elements:
            if not isinstance(element, dict) or not isinstance(element.get(ID_KEYWORD), str):
                continue
            if operation.response_ref:
                valid, _, _ = validate_instance(element, operation.response_ref, self._components)
                if not valid:
                    continue
            return element[ID_KEYWORD]
        return None

    def _validate(self, route: str, operation: OperationSpec, fetched: _Fetched) -> RouteResult:
        if fetched.error is not None:
            return RouteResult(route, CheckStatus.FAIL_HTTP, fetched.error, url=fetched.url)
        if not operation.response_ref:
            return RouteResult(route, CheckStatus.PASS, "no response schema", url=fetched.url)

        valid, message, field = validate_instance(
            fetched.data,
            operation.response_ref,
            self._components,
            as_array=operation.response_arity is ResponseArity.ARRAY,
        )
        if not valid:
            log_warning(
                message=f"Schema violation on {route}",
                extra={"route": route, "field": field, "reason": message}
            )
            return RouteResult(route, CheckStatus.FAIL_SCHEMA, message, url=fetched.url, field=field)

        count = len(fetched.data) if isinstance(fetched.data, list) else 1
        return RouteResult(route, CheckStatus.PASS, f"{count} resource(s) valid", url=fetched.url)

