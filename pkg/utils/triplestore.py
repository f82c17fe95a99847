"""
Embedded SPARQL store.

An rdflib Dataset served through an httpx transport that speaks the
SPARQL 1.1 Protocol, so the gateway can run without an external triple
store (endpoint ``memory:``) and tests exercise the real HTTP client:
- query via GET/POST (``application/sparql-query`` or form-encoded)
- update via POST (``application/sparql-update`` or form-encoded)
- ``default-graph-uri`` restricts a query to one named graph
- without it the default graph is the union of all graphs
"""

from pathlib import Path
from typing import Dict, List, Optional, Union
from urllib.parse import parse_qs

import httpx
from rdflib import Dataset, Graph, URIRef

from utils.logger import log_debug, log_info, log_warning

_SEED_FORMATS: Dict[str, str] = {
    ".ttl": "turtle",
    ".nt": "nt",
    ".trig": "trig",
    ".nq": "nquads",
    ".jsonld": "json-ld",
    ".owl": "xml",
    ".rdf": "xml",
    ".xml": "xml",
}

_QUAD_FORMATS = ("trig", "nquads")


class EmbeddedStore:
    """
    In-process SPARQL endpoint over an rdflib Dataset.

    Attributes:
        dataset: Backing Dataset (default graph = union of named graphs)
        received: Every query/update text received, oldest first
        available: When False, requests fail with a connection error
    """

    def __init__(self):
        self.dataset = Dataset(default_union=True)
        self.received: List[str] = []
        self.available = True

    def load(self, source: Union[str, Path], graph_iri: str, format: Optional[str] = None):
        """
        Load an RDF file into a named graph.

        TriG and N-Quads files keep their own graph names.

        Args:
            source: File path
            graph_iri: Named graph for triple formats
            format: rdflib format name (default: from the extension)

        Raises:
            ValueError: If the format cannot be determined
        """
        path = Path(source)
        format = format or _SEED_FORMATS.get(path.suffix.lower())
        if format is None:
            raise ValueError(f"Cannot determine RDF format of {path}")

        data = path.read_bytes()
        if format in _QUAD_FORMATS:
            self.dataset.parse(data=data, format=format)
        else:
            self.named_graph(graph_iri).parse(data=data, format=format)
        log_info(message=f"Seeded embedded store from {path}", extra={"graph": graph_iri, "format": format})

    def add_graph(self, graph: Graph, graph_iri: str):
        """Copy every triple of a graph into a named graph."""
        target = self.named_graph(graph_iri)
        for triple in graph:
            target.add(triple)

    def named_graph(self, graph_iri: str) -> Graph:
        """View of one named graph sharing the dataset store."""
        return Graph(store=self.dataset.store, identifier=URIRef(graph_iri))

    def triple_count(self, graph_iri: Optional[str] = None) -> int:
        """Triples in one named graph, or quads in the whole dataset."""
        if graph_iri is not None:
            return len(self.named_graph(graph_iri))
        return sum(1 for _ in self.dataset.quads((None, None, None, None)))

    def graph_counts(self) -> Dict[str, int]:
        """Triple count of every non-empty named graph."""
        counts: Dict[str, int] = {}
        for _, _, _, context in self.dataset.quads((None, None, None, None)):
            key = str(context.identifier if hasattr(context, "identifier") else context)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def transport(self) -> httpx.MockTransport:
        """httpx transport routing every request to this store."""
        return httpx.MockTransport(self.handle)

    def handle(self, request: httpx.Request) -> httpx.Response:
        """
        Answer one SPARQL Protocol request.

        Raises:
            httpx.ConnectError: When the store is marked unavailable
        """
        if not self.available:
            raise httpx.ConnectError("Embedded store unavailable", request=request)

        params = {k: request.url.params.get_list(k) for k in request.url.params.keys()}
        query: Optional[str] = None
        update: Optional[str] = None

        if request.method == "GET":
            query = (params.get("query") or [None])[0]
        elif request.method == "POST":
            content_type = request.headers.get("content-type", "").split(";", 1)[0].strip().lower()
            body = request.content.decode("utf-8")
            if content_type == "application/sparql-query":
                query = body
            elif content_type == "application/sparql-update":
                update = body
            elif content_type == "application/x-www-form-urlencoded":
                form = parse_qs(body, keep_blank_values=True)
                query = (form.get("query") or [None])[0]
                update = (form.get("update") or [None])[0]
                params.setdefault("default-graph-uri", []).extend(form.get("default-graph-uri", []))
            else:
                return _text_response(415, f"Unsupported content type {content_type!r}")
        else:
            return _text_response(405, "Only GET and POST are supported")

        if query is not None:
            return self._run_query(query, params.get("default-graph-uri", []), request)
        if update is not None:
            return self._run_update(update)
        return _text_response(400, "Missing query or update")

    def _run_query(self, query: str, default_graphs: List[str], request: httpx.Request) -> httpx.Response:
        self.received.append(query)
        if len(default_graphs) > 1:
            return _text_response(400, "Only one default-graph-uri is supported")
        target = self.named_graph(default_graphs[0]) if default_graphs else self.dataset

        try:
            result = target.query(query)
        except Exception as e:  # rdflib raises parser and evaluation errors of many types
            log_warning(message="Embedded store rejected query", extra={"reason": str(e)})
            return _text_response(400, f"Query failed: {e}")

        if result.type in ("CONSTRUCT", "DESCRIBE"):
            body = result.graph.serialize(format="turtle")
            return httpx.Response(200, content=body.encode("utf-8"), headers={"Content-Type": "text/turtle"})

        payload = result.serialize(format="json")
        log_debug(message="Embedded store answered query", extra={"type": result.type})
        return httpx.Response(
            200,
            content=payload if isinstance(payload, bytes) else payload.encode("utf-8"),
            headers={"Content-Type": "application/sparql-results+json"},
        )

    def _run_update(self, update: str) -> httpx.Response:
        self.received.append(update)
        try:
            self.dataset.update(update)
        except Exception as e:  # rdflib raises parser and evaluation errors of many types
            log_warning(message="Embedded store rejected update", extra={"reason": str(e)})
            return _text_response(400, f"Update failed: {e}")
        return httpx.Response(204)


def _text_response(status: int, message: str) -> httpx.Response:
    return httpx.Response(status, content=message.encode("utf-8"), headers={"Content-Type": "text/plain"})
