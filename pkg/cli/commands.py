"""
Command line interface.

    python -m cli generate [--filter Band] -o build/ ontology.ttl
    python -m cli serve -c gateway.yaml [--check-only]
    python -m cli check --base http://localhost:8080 --spec build/openapi.yaml [--report report.jsonl]
"""

import asyncio
from pathlib import Path
from typing import Iterable, Optional, Tuple

import click
import yaml

from api.server import serve
from config.gateway import ConfigError, load_gateway_config
from config.settings import API_TITLE, API_VERSION, CHECK_CONCURRENCY
from models.api_spec import ApiSpecDocument
from models.ontology import OntologyModel
from services.artifacts import compile_artifacts, write_artifacts
from services.conformance import ConformanceRunner, ServerUnreachableError
from services.ontology_loader import OntologyError, load_ontology
from services.spec_compiler import CompilerConfig, SpecCompileError, parse_spec
from utils.logger import configure_logging
from utils.naming import is_absolute_iri


class UnreachableServerException(click.ClickException):
    """Conformance target refused the connection."""
    exit_code = 2


def resolve_filter(model: OntologyModel, names: Iterable[str]) -> Tuple[str, ...]:
    """
    Map --filter values (local names or IRIs) to class IRIs.

    Unknown names are passed through so the compiler reports them.
    """
    resolved = []
    for name in names:
        if is_absolute_iri(name):
            resolved.append(name)
            continue
        cls = model.class_by_local_name(name)
        resolved.append(cls.iri if cls is not None else name)
    return tuple(resolved)


def create_runner(base_url: str, document: ApiSpecDocument, concurrency: int) -> ConformanceRunner:
    """Conformance runner talking to the gateway over the network."""
    return ConformanceRunner(base_url, document, concurrency=concurrency)


@click.group()
@click.option("--log-level", default=None, help="Logging level (DEBUG, INFO, WARNING, ERROR)")
def cli(log_level: Optional[str]):
    """Ontology to REST API compiler and gateway."""
    configure_logging(log_level)


@cli.command()
@click.argument("sources", nargs=-1, required=True)
@click.option("-o", "--output", required=True, type=click.Path(file_okay=False, path_type=Path),
              help="Artifact directory")
@click.option("--filter", "filters", multiple=True, help="Class local name or IRI to include (repeatable)")
@click.option("--include-undomained", is_flag=True, help="Attach properties without domain to every class")
@click.option("--title", default=API_TITLE, show_default=True, help="API title")
@click.option("--version", "api_version", default=API_VERSION, show_default=True, help="API version")
@click.option("--server-url", default=None, help="Server URL written to the specification")
def generate(
    sources: Tuple[str, ...],
    output: Path,
    filters: Tuple[str, ...],
    include_undomained: bool,
    title: str,
    api_version: str,
    server_url: Optional[str]
):
    """Compile ontology SOURCES (files or URLs) into an artifact directory."""
    try:
        model = load_ontology(list(sources))
        config = CompilerConfig(
            title=title,
            version=api_version,
            filter=frozenset(resolve_filter(model, filters)) if filters else None,
            include_undomained=include_undomained,
            server_url=server_url,
        )
        artifacts = compile_artifacts(model, config)
        written = write_artifacts(artifacts, output)
    except (OntologyError, SpecCompileError) as e:
        raise click.ClickException(str(e))
    except OSError as e:
        raise click.ClickException(f"Cannot write {output}: {e.strerror or e}")

    click.echo(
        f"Generated {len(artifacts.document.schemas)} schemas and "
        f"{len(artifacts.document.paths)} routes ({len(written)} files) in {output}"
    )


@cli.command("serve")
@click.option("-c", "--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Gateway YAML configuration")
@click.option("--check-only", is_flag=True, help="Validate artifacts and exit without listening")
@click.pass_context
def serve_command(ctx: click.Context, config_path: Path, check_only: bool):
    """Serve the API described by an artifact directory."""
    try:
        config = load_gateway_config(config_path)
    except ConfigError as e:
        raise click.ClickException(str(e))

    code = serve(config, check_only=check_only)
    if code:
        raise click.ClickException("Gateway failed to start (see log)")
    if check_only:
        click.echo(f"Artifacts in {config.artifacts} are consistent")
    ctx.exit(0)


@cli.command()
@click.option("--base", required=True, help="Base URL of the running gateway")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Compiled openapi.yaml")
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the JSON lines report to this file")
@click.option("--concurrency", default=CHECK_CONCURRENCY, show_default=True, type=click.IntRange(min=1),
              help="Maximum in-flight requests")
@click.pass_context
def check(ctx: click.Context, base: str, spec_path: Path, report_path: Optional[Path], concurrency: int):
    """Check every GET route of a running gateway against its specification."""
    try:
        document = parse_spec(spec_path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError, SpecCompileError, ValueError, KeyError) as e:
        raise click.ClickException(f"Cannot read specification {spec_path}: {e}")

    try:
        report = asyncio.run(create_runner(base, document, concurrency).run())
    except ServerUnreachableError as e:
        raise UnreachableServerException(str(e))

    click.echo(report.render_table(), nl=False)
    if report_path is not None:
        report_path.write_text(report.to_json_lines(), encoding="utf-8")
    ctx.exit(1 if report.failed else 0)
