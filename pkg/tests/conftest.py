"""
Shared fixtures: ontology models, gateway configuration and an ASGI client
wired to an embedded SPARQL store.
"""

from pathlib import Path
from typing import Any, Dict

import httpx
import pytest

from api.app import create_app
from config.gateway import GatewayConfig, build_gateway_config
from services.artifacts import compile_artifacts
from services.ontology_loader import load_ontology
from utils.logger import clear_logs
from utils.triplestore import EmbeddedStore

FIXTURES = Path(__file__).parent / "fixtures"

EX = "https://w3id.org/example#"
REGION = EX + "Region"
PART_OF_REGION = EX + "partOfRegion"
INSTANCE_PREFIX = "https://w3id.org/example/instance/"
GRAPH_BASE = "https://w3id.org/example/graphs/"
DEFAULT_GRAPH = GRAPH_BASE + "public"

OKG = "https://w3id.org/okg#"
OKG_INSTANCE_PREFIX = "https://w3id.org/okg/instance/"

TOKENS = {"alice-token": "alice", "bob-token": "bob"}


def gateway_settings(**overrides: Any) -> Dict[str, Any]:
    """Configuration mapping of the test gateway."""
    data: Dict[str, Any] = {
        "endpoint": {"query": "memory:"},
        "instance_prefix": INSTANCE_PREFIX,
        "graph_base": GRAPH_BASE,
        "default_graph": DEFAULT_GRAPH,
    }
    data.update(overrides)
    return data


def make_config(base_dir: Path, **overrides: Any) -> GatewayConfig:
    return build_gateway_config(gateway_settings(**overrides), base_dir)


def bearer(token: str) -> Dict[str, str]:
    return {"Authorization": f"Bearer {token}"}


@pytest.fixture(autouse=True)
def clean_logs():
    clear_logs()
    yield
    clear_logs()


@pytest.fixture
def region_model():
    return load_ontology([FIXTURES / "region.ttl"])


@pytest.fixture
def catalog_model():
    return load_ontology([FIXTURES / "catalog.ttl"])


@pytest.fixture
def region_artifacts(region_model):
    return compile_artifacts(region_model)


@pytest.fixture
def store():
    return EmbeddedStore()


@pytest.fixture
def seeded_store(store):
    store.load(FIXTURES / "region-data.ttl", DEFAULT_GRAPH)
    return store


async def open_client(app) -> httpx.AsyncClient:
    return httpx.AsyncClient(transport=httpx.ASGITransport(app=app), base_url="http://gateway")


@pytest.fixture
async def region_client(region_artifacts, seeded_store, tmp_path):
    """Anonymous-write gateway over the seeded region store."""
    app = create_app(make_config(tmp_path), artifacts=region_artifacts, transport=seeded_store.transport())
    async with await open_client(app) as client:
        yield client
    await app.state.client.close()


@pytest.fixture
async def empty_region_client(region_artifacts, store, tmp_path):
    app = create_app(make_config(tmp_path), artifacts=region_artifacts, transport=store.transport())
    async with await open_client(app) as client:
        yield client
    await app.state.client.close()
