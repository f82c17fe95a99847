"""
Tests for gateway configuration loading.
"""

import pytest
import yaml

from config.gateway import AuthMode, ConfigError, ReadScope, build_gateway_config, load_gateway_config
from tests.conftest import GRAPH_BASE, INSTANCE_PREFIX, TOKENS, gateway_settings


def _write(tmp_path, data) -> str:
    path = tmp_path / "gateway.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return str(path)


def test_defaults(tmp_path):
    config = load_gateway_config(_write(tmp_path, gateway_settings()))

    assert config.endpoint.is_embedded
    assert config.endpoint.update_url == "memory:"
    assert config.auth.mode is AuthMode.NONE
    assert config.read_scope is ReadScope.ALL_GRAPHS
    assert config.port == 8080
    assert config.artifacts == str(tmp_path.resolve())


def test_relative_paths_resolved(tmp_path):
    data = gateway_settings(
        endpoint={"query": "memory:", "seed": ["data/seed.ttl"]},
        custom_queries="queries",
        artifacts="build",
    )
    config = load_gateway_config(_write(tmp_path, data))

    base = tmp_path.resolve()
    assert config.endpoint.seed == [str(base / "data" / "seed.ttl")]
    assert config.custom_queries == str(base / "queries")
    assert config.artifacts == str(base / "build")


def test_separate_update_endpoint(tmp_path):
    data = gateway_settings(endpoint={"query": "http://kg.test/sparql", "update": "http://kg.test/update"})
    config = build_gateway_config(data, tmp_path)
    assert not config.endpoint.is_embedded
    assert config.endpoint.update_url == "http://kg.test/update"


def test_static_tokens(tmp_path):
    data = gateway_settings(auth={"mode": "static-token", "tokens": TOKENS}, read_scope="own-graph")
    config = build_gateway_config(data, tmp_path)
    assert config.auth.mode is AuthMode.STATIC_TOKEN
    assert config.auth.tokens["alice-token"] == "alice"
    assert config.read_scope is ReadScope.OWN_GRAPH


@pytest.mark.parametrize("overrides,key", [
    ({"instance_prefix": "instances/"}, "instance_prefix"),
    ({"instance_prefix": INSTANCE_PREFIX.rstrip("/")}, "instance_prefix"),
    ({"graph_base": "urn:graphs"}, "graph_base"),
    ({"default_graph": "public"}, "default_graph"),
    ({"endpoint": {"query": "ftp://kg.test/sparql"}}, "endpoint.query"),
    ({"port": 0}, "port"),
    ({"read_scope": "everything"}, "read_scope"),
    ({"colour": "blue"}, "colour"),
])
def test_invalid_values(tmp_path, overrides, key):
    with pytest.raises(ConfigError) as exc_info:
        build_gateway_config(gateway_settings(**overrides), tmp_path)
    assert key in exc_info.value.keys
    assert str(exc_info.value).startswith("Invalid configuration [")


def test_missing_required_keys(tmp_path):
    with pytest.raises(ConfigError) as exc_info:
        build_gateway_config({"endpoint": {"query": "memory:"}}, tmp_path)
    assert set(exc_info.value.keys) == {"instance_prefix", "graph_base", "default_graph"}


def test_static_token_without_tokens(tmp_path):
    with pytest.raises(ConfigError, match="at least one token"):
        build_gateway_config(gateway_settings(auth={"mode": "static-token"}), tmp_path)


def test_username_must_name_a_graph(tmp_path):
    data = gateway_settings(auth={"mode": "static-token", "tokens": {"t": "bad name"}})
    with pytest.raises(ConfigError, match="cannot name a graph"):
        build_gateway_config(data, tmp_path)


def test_environment_overrides_file(tmp_path, monkeypatch):
    monkeypatch.setenv("ONTOGATE_PORT", "9090")
    monkeypatch.setenv("ONTOGATE_GRAPH_BASE", GRAPH_BASE + "tenants/")
    config = load_gateway_config(_write(tmp_path, gateway_settings(port=8000)))
    assert config.port == 9090
    assert config.graph_base == GRAPH_BASE + "tenants/"


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_gateway_config(tmp_path / "missing.yaml")


def test_not_a_mapping(tmp_path):
    path = tmp_path / "gateway.yaml"
    path.write_text("- just\n- a list\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_gateway_config(path)
