"""
Tests for the command line interface.
"""

import json

import httpx
import pytest
import yaml
from click.testing import CliRunner

from api.app import create_app
from cli import commands
from cli.commands import cli
from config.gateway import load_gateway_config
from models.api_spec import ApiSpecDocument
from services.conformance import ConformanceRunner
from tests.conftest import FIXTURES, gateway_settings


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def deployment(runner, tmp_path):
    """Compiled region artifacts next to a gateway.yaml seeding the embedded store."""
    result = runner.invoke(cli, ["generate", "-o", str(tmp_path), str(FIXTURES / "region.ttl")])
    assert result.exit_code == 0, result.output
    settings = gateway_settings(endpoint={"query": "memory:", "seed": [str(FIXTURES / "region-data.ttl")]})
    config_path = tmp_path / "gateway.yaml"
    config_path.write_text(yaml.safe_dump(settings), encoding="utf-8")
    return config_path


class TestGenerate:

    def test_counts(self, runner, tmp_path):
        result = runner.invoke(cli, ["generate", "-o", str(tmp_path / "out"), str(FIXTURES / "catalog.ttl")])
        assert result.exit_code == 0, result.output
        assert "Generated 6 schemas and 12 routes (33 files)" in result.output
        assert (tmp_path / "out" / "openapi.yaml").is_file()

    def test_filter_by_local_name(self, runner, tmp_path):
        result = runner.invoke(cli, [
            "generate", "-o", str(tmp_path), "--filter", "Student", str(FIXTURES / "people.ttl"),
        ])
        assert result.exit_code == 0, result.output
        assert "Generated 3 schemas and 6 routes (18 files)" in result.output

    def test_unknown_filter(self, runner, tmp_path):
        result = runner.invoke(cli, [
            "generate", "-o", str(tmp_path), "--filter", "Planet", str(FIXTURES / "region.ttl"),
        ])
        assert result.exit_code == 1
        assert "Planet" in result.output

    def test_unreadable_ontology(self, runner, tmp_path):
        result = runner.invoke(cli, ["generate", "-o", str(tmp_path), str(FIXTURES / "broken.ttl")])
        assert result.exit_code == 1
        assert "Error:" in result.output
        assert not (tmp_path / "openapi.yaml").exists()


class TestServe:

    def test_check_only(self, runner, deployment):
        result = runner.invoke(cli, ["serve", "-c", str(deployment), "--check-only"])
        assert result.exit_code == 0, result.output
        assert "consistent" in result.output

    def test_missing_artifacts(self, runner, tmp_path):
        config_path = tmp_path / "gateway.yaml"
        config_path.write_text(yaml.safe_dump(gateway_settings()), encoding="utf-8")
        result = runner.invoke(cli, ["serve", "-c", str(config_path), "--check-only"])
        assert result.exit_code == 1

    def test_invalid_config(self, runner, tmp_path):
        config_path = tmp_path / "gateway.yaml"
        config_path.write_text(yaml.safe_dump(gateway_settings(instance_prefix="not an iri")), encoding="utf-8")
        result = runner.invoke(cli, ["serve", "-c", str(config_path), "--check-only"])
        assert result.exit_code == 1
        assert "instance_prefix" in result.output


def _route_checks_to(monkeypatch, transport):
    def create_runner(base_url, document, concurrency):
        return ConformanceRunner(base_url, document, transport=transport, concurrency=concurrency)

    monkeypatch.setattr(commands, "create_runner", create_runner)


class TestCheck:

    def test_conforming_gateway(self, runner, deployment, tmp_path, monkeypatch):
        app = create_app(load_gateway_config(deployment))
        _route_checks_to(monkeypatch, httpx.ASGITransport(app=app))
        report_path = tmp_path / "report.jsonl"
        result = runner.invoke(
            cli,
            ["check", "--base", "http://gateway", "--spec", str(tmp_path / "openapi.yaml"),
             "--report", str(report_path)],
        )
        assert result.exit_code == 0, result.output
        assert "2 routes: pass=2" in result.output

        lines = [json.loads(line) for line in report_path.read_text().splitlines()]
        assert {line["route"] for line in lines[:-1]} == {"/regions", "/regions/{id}"}
        assert lines[-1]["totals"]["pass"] == 2

    def test_failing_gateway(self, runner, deployment, tmp_path, monkeypatch):
        app = create_app(load_gateway_config(deployment))
        app.state.store.available = False
        _route_checks_to(monkeypatch, httpx.ASGITransport(app=app))
        result = runner.invoke(
            cli,
            ["check", "--base", "http://gateway", "--spec", str(tmp_path / "openapi.yaml")],
        )
        assert result.exit_code == 1
        assert "fail-http" in result.output

    def test_unreachable_server(self, runner, deployment, tmp_path, monkeypatch):
        def refuse(request: httpx.Request) -> httpx.Response:
            raise httpx.ConnectError("Connection refused", request=request)

        _route_checks_to(monkeypatch, httpx.MockTransport(refuse))
        result = runner.invoke(
            cli,
            ["check", "--base", "http://localhost:1", "--spec", str(tmp_path / "openapi.yaml")],
        )
        assert result.exit_code == 2

    def test_default_runner_uses_network(self):
        runner = commands.create_runner("http://localhost:8080/", ApiSpecDocument(title="API", version="1.0.0"), 4)
        assert runner.base_url == "http://localhost:8080"
        assert runner.transport is None

    def test_missing_spec(self, runner, tmp_path):
        result = runner.invoke(cli, ["check", "--base", "http://gateway", "--spec", str(tmp_path / "none.yaml")])
        assert result.exit_code == 2
