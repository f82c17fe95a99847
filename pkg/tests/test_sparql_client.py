"""
Tests for the SPARQL Protocol client against mock and embedded endpoints.
"""

import httpx
import pytest
from rdflib import Literal, URIRef
from rdflib.namespace import RDFS

from services.sparql_client import SparqlClient, SparqlEndpointError, SparqlQueryError
from tests.conftest import DEFAULT_GRAPH, GRAPH_BASE, INSTANCE_PREFIX
from utils.logger import get_logs

ENDPOINT = "http://kg.test/sparql"
TEXAS = INSTANCE_PREFIX + "Texas"
CONSTRUCT_ALL = "CONSTRUCT WHERE { ?s ?p ?o }"
TURTLE = f'<{TEXAS}> <{RDFS.label}> "Texas" .\n'


def _client(handler, **options) -> SparqlClient:
    options.setdefault("backoff_seconds", 0)
    return SparqlClient(ENDPOINT, transport=httpx.MockTransport(handler), **options)


class TestRetries:

    async def test_recovers_after_server_errors(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(request)
            if len(calls) < 3:
                return httpx.Response(503)
            return httpx.Response(200, text=TURTLE, headers={"Content-Type": "text/turtle"})

        client = _client(handler, max_retries=2)
        graph = await client.construct(CONSTRUCT_ALL)
        await client.close()

        assert len(calls) == 3
        assert (URIRef(TEXAS), RDFS.label, Literal("Texas")) in graph
        failures = [e for e in get_logs() if e["level"] == "ERROR"]
        assert [e["extra"]["will_retry"] for e in failures] == [True, True]

    async def test_gives_up(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(request)
            raise httpx.ConnectError("refused", request=request)

        client = _client(handler, max_retries=1)
        with pytest.raises(SparqlEndpointError, match="unreachable"):
            await client.construct(CONSTRUCT_ALL)
        await client.close()
        assert len(calls) == 2

    async def test_client_errors_not_retried(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(request)
            return httpx.Response(400, text="Parse error")

        client = _client(handler, max_retries=3)
        with pytest.raises(SparqlQueryError) as exc_info:
            await client.update("INSERT DATA { bad")
        await client.close()
        assert exc_info.value.status == 400
        assert len(calls) == 1


class TestRequests:

    async def test_protocol_headers(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["content_type"] = request.headers["content-type"]
            seen["accept"] = request.headers["accept"]
            seen["graph"] = request.url.params.get("default-graph-uri")
            seen["body"] = request.content.decode("utf-8")
            return httpx.Response(200, text=TURTLE, headers={"Content-Type": "text/turtle; charset=utf-8"})

        client = _client(handler)
        await client.construct(CONSTRUCT_ALL, default_graph=DEFAULT_GRAPH)
        await client.close()

        assert seen["content_type"].startswith("application/sparql-query")
        assert seen["accept"].startswith("text/turtle")
        assert seen["graph"] == DEFAULT_GRAPH
        assert seen["body"] == CONSTRUCT_ALL

    async def test_json_ld_results(self):
        payload = f'[{{"@id": "{TEXAS}", "{RDFS.label}": [{{"@value": "Texas"}}]}}]'

        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, text=payload, headers={"Content-Type": "application/ld+json"})

        client = _client(handler)
        graph = await client.construct(CONSTRUCT_ALL)
        await client.close()
        assert (URIRef(TEXAS), RDFS.label, Literal("Texas")) in graph

    async def test_unsupported_result_type(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, text="<html/>", headers={"Content-Type": "text/html"})

        client = _client(handler)
        with pytest.raises(SparqlEndpointError, match="text/html"):
            await client.construct(CONSTRUCT_ALL)
        await client.close()


class TestEmbeddedStore:

    async def test_graph_scoping(self, seeded_store):
        private = GRAPH_BASE + "alice"
        client = SparqlClient("http://embedded.test/sparql", transport=seeded_store.transport())
        await client.update(f'INSERT DATA {{ GRAPH <{private}> {{ <{TEXAS}> <{RDFS.comment}> "private" }} }}')

        union = await client.construct(CONSTRUCT_ALL)
        public = await client.construct(CONSTRUCT_ALL, default_graph=DEFAULT_GRAPH)
        own = await client.construct(CONSTRUCT_ALL, default_graph=private)
        await client.close()

        assert len(union) == len(public) + 1
        assert len(own) == 1
        assert seeded_store.graph_counts()[private] == 1

    async def test_unavailable_store(self, store):
        store.available = False
        client = SparqlClient("http://embedded.test/sparql", transport=store.transport(), max_retries=0)
        with pytest.raises(SparqlEndpointError):
            await client.construct(CONSTRUCT_ALL)
        await client.close()
