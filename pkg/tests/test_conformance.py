"""
Tests for the GET conformance runner.
"""

import httpx
import pytest
from rdflib import Literal, URIRef
from rdflib.namespace import XSD

from api.app import create_app
from models.report import CheckStatus
from services.artifacts import compile_artifacts
from services.conformance import ServerUnreachableError, run_check
from tests.conftest import DEFAULT_GRAPH, FIXTURES, OKG, OKG_INSTANCE_PREFIX, make_config

BASE = "http://gateway"
RELEASE_YEAR = URIRef(OKG + "releaseYear")
CYCLES_V2 = URIRef(OKG_INSTANCE_PREFIX + "CYCLES_v2")


@pytest.fixture
def catalog_artifacts(catalog_model):
    return compile_artifacts(catalog_model)


@pytest.fixture
def catalog_store(store):
    store.load(FIXTURES / "catalog-data.ttl", DEFAULT_GRAPH)
    return store


@pytest.fixture
async def catalog_app(catalog_artifacts, catalog_store, tmp_path):
    config = make_config(tmp_path, instance_prefix=OKG_INSTANCE_PREFIX)
    app = create_app(config, artifacts=catalog_artifacts, transport=catalog_store.transport())
    yield app
    await app.state.client.close()


def _statuses(report):
    return {r.route: r.status for r in report.results}


async def test_seeded_catalog_conforms(catalog_app, catalog_artifacts):
    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    statuses = _statuses(report)
    assert len(statuses) == 12
    assert statuses.pop("/datasets/{id}") is CheckStatus.SKIP_EMPTY
    assert set(statuses.values()) == {CheckStatus.PASS}
    assert not report.failed
    assert report.totals()["pass"] == 11


async def test_ill_typed_literal_fails_collection(catalog_app, catalog_artifacts, catalog_store):
    graph = catalog_store.named_graph(DEFAULT_GRAPH)
    graph.remove((CYCLES_V2, RELEASE_YEAR, None))
    graph.add((CYCLES_V2, RELEASE_YEAR, Literal("2019", datatype=XSD.string)))

    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    failures = report.failures()
    assert [(r.route, r.status) for r in failures] == [("/softwareversions", CheckStatus.FAIL_SCHEMA)]
    assert failures[0].field == "1/releaseYear/0"
    assert _statuses(report)["/softwareversions/{id}"] is CheckStatus.PASS


async def test_invalid_first_element_reported_once(catalog_app, catalog_artifacts, catalog_store):
    cycles_v1 = URIRef(OKG_INSTANCE_PREFIX + "CYCLES_v1")
    graph = catalog_store.named_graph(DEFAULT_GRAPH)
    graph.remove((cycles_v1, RELEASE_YEAR, None))
    graph.add((cycles_v1, RELEASE_YEAR, Literal("2018", datatype=XSD.string)))

    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    failures = report.failures()
    assert [(r.route, r.status) for r in failures] == [("/softwareversions", CheckStatus.FAIL_SCHEMA)]
    assert failures[0].field == "0/releaseYear/0"
    item = next(r for r in report.results if r.route == "/softwareversions/{id}")
    assert item.status is CheckStatus.PASS
    assert item.url.endswith("/softwareversions/CYCLES_v2")


async def test_no_valid_element_skips_item_route(catalog_app, catalog_artifacts, catalog_store):
    graph = catalog_store.named_graph(DEFAULT_GRAPH)
    for version in sorted(set(graph.subjects(RELEASE_YEAR, None)), key=str):
        graph.remove((version, RELEASE_YEAR, None))
        graph.add((version, RELEASE_YEAR, Literal("unknown", datatype=XSD.string)))

    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    statuses = _statuses(report)
    assert statuses["/softwareversions"] is CheckStatus.FAIL_SCHEMA
    assert statuses["/softwareversions/{id}"] is CheckStatus.SKIP_EMPTY
    assert [r.route for r in report.failures()] == ["/softwareversions"]


async def test_endpoint_failure_reported(catalog_app, catalog_artifacts, catalog_store):
    catalog_store.available = False
    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    statuses = _statuses(report)
    assert set(statuses.values()) == {CheckStatus.FAIL_HTTP}
    assert "HTTP 502" in next(r.detail for r in report.results if r.route == "/regions")


async def test_parameterized_routes_skipped(region_artifacts, seeded_store, tmp_path):
    config = make_config(tmp_path, custom_queries=str(FIXTURES / "custom"))
    app = create_app(config, artifacts=region_artifacts, transport=seeded_store.transport())
    report = await run_check(BASE, app.state.document, transport=httpx.ASGITransport(app=app))
    await app.state.client.close()

    statuses = _statuses(report)
    assert statuses["/regions/part-of"] is CheckStatus.SKIP_PARAMS
    assert statuses["/regions"] is CheckStatus.PASS
    assert statuses["/regions/{id}"] is CheckStatus.PASS


async def test_unreachable_server(catalog_artifacts):
    def refuse(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("Connection refused", request=request)

    with pytest.raises(ServerUnreachableError) as exc_info:
        await run_check(BASE, catalog_artifacts.document, transport=httpx.MockTransport(refuse))
    assert exc_info.value.base_url == BASE


async def test_report_rendering(catalog_app, catalog_artifacts):
    report = await run_check(BASE, catalog_artifacts.document, transport=httpx.ASGITransport(app=catalog_app))

    lines = report.to_json_lines().splitlines()
    assert len(lines) == 13
    assert '"totals"' in lines[-1]
    table = report.render_table()
    assert table.startswith("ROUTE")
    assert "12 routes: pass=11" in table
