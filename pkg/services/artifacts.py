"""
Artifact set service.

Compiles, writes and reloads the files the gateway serves from:
- openapi.yaml      compiled specification
- context.jsonld    JSON-LD context
- paths.map         path segment to class IRI table
- templates/<segment>/<kind>.rq   SPARQL templates per class
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import yaml

from models.api_spec import ApiSpecDocument
from models.ontology import OntologyModel
from models.query import QueryKind, QueryTemplate
from models.resource import ContextMap, PathClassTable
from services.jsonld_bridge import generate_context
from services.query_templates import (
    TemplateError,
    generate_default_templates,
    render_template_file,
    template_from_file,
)
from services.spec_compiler import (
    CompilerConfig,
    SpecCompileError,
    compile_spec,
    parse_spec,
    path_name,
    select_classes,
    serialize_spec,
)
from utils.logger import log_info

SPEC_FILE = "openapi.yaml"
CONTEXT_FILE = "context.jsonld"
PATHS_FILE = "paths.map"
TEMPLATES_DIR = "templates"

COLLECTION_KINDS = {"get": QueryKind.GET_ALL, "post": QueryKind.INSERT}
ITEM_KINDS = {"get": QueryKind.GET_BY_ID, "put": QueryKind.UPDATE, "delete": QueryKind.DELETE}


class ArtifactError(Exception):
    """Exception for missing or inconsistent artifacts."""

    def __init__(self, gaps: List[str]):
        self.gaps = list(gaps)
        super().__init__("Inconsistent artifacts:\n  " + "\n  ".join(self.gaps))


@dataclass
class ArtifactSet:
    """
    Everything the gateway needs to serve an API.

    Attributes:
        spec_text: Serialized specification, served verbatim
        document: Parsed specification
        context: JSON-LD context
        table: Path segment to class IRI table
        templates: Templates per path segment and kind
    """

    spec_text: str
    document: ApiSpecDocument
    context: ContextMap
    table: PathClassTable
    templates: Dict[str, Dict[QueryKind, QueryTemplate]] = field(default_factory=dict)

    def template(self, segment: str, kind: QueryKind) -> Optional[QueryTemplate]:
        return self.templates.get(segment, {}).get(kind)


def compile_artifacts(model: OntologyModel, config: Optional[CompilerConfig] = None) -> ArtifactSet:
    """
    Compile an ontology model into a complete artifact set.

    Raises:
        SpecCompileError: On compilation errors
    """
    config = config or CompilerConfig()
    document = compile_spec(model, config)
    included = select_classes(model, config.filter, config.include_undomained)

    entries: Dict[str, str] = {}
    templates: Dict[str, Dict[QueryKind, QueryTemplate]] = {}
    for class_iri in sorted(included):
        cls = model.get_class(class_iri)
        segment = path_name(cls)
        entries[segment] = class_iri
        try:
            generated = generate_default_templates(cls, segment)
        except TemplateError as e:
            raise SpecCompileError(str(e))
        templates[segment] = {t.kind: t for t in generated}

    return ArtifactSet(
        spec_text=serialize_spec(document),
        document=document,
        context=generate_context(model, included, config.include_undomained),
        table=PathClassTable(entries),
        templates=templates,
    )


def render_context(context: ContextMap) -> str:
    return json.dumps(context.to_jsonld(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_artifacts(artifacts: ArtifactSet, output_dir: Union[str, Path]) -> List[Path]:
    """
    Write an artifact set to a directory.

    Output is deterministic: the same set always produces identical files.

    Returns:
        Written file paths
    """
    root = Path(output_dir)
    root.mkdir(parents=True, exist_ok=True)

    files = {
        root / SPEC_FILE: artifacts.spec_text,
        root / CONTEXT_FILE: render_context(artifacts.context),
        root / PATHS_FILE: artifacts.table.to_text(),
    }
    for segment, by_kind in sorted(artifacts.templates.items()):
        for kind, template in sorted(by_kind.items(), key=lambda item: item[0].value):
            files[root / TEMPLATES_DIR / segment / kind.file_name] = render_template_file(template)

    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")

    log_info(message=f"Artifacts written to {root}", extra={"files": len(files)})
    return sorted(files)


def load_artifacts(directory: Union[str, Path]) -> ArtifactSet:
    """
    Read an artifact directory and check it is consistent.

    Raises:
        ArtifactError: Listing every missing file, unreadable file or gap
    """
    root = Path(directory)
    gaps: List[str] = []

    spec_text = _read(root / SPEC_FILE, gaps)
    context_text = _read(root / CONTEXT_FILE, gaps)
    table_text = _read(root / PATHS_FILE, gaps)
    if gaps:
        raise ArtifactError(gaps)

    try:
        document = parse_spec(spec_text)
    except (yaml.YAMLError, SpecCompileError, ValueError, KeyError) as e:
        gaps.append(f"{SPEC_FILE}: {e}")
    try:
        context = ContextMap.from_jsonld(json.loads(context_text))
    except (ValueError, KeyError, AttributeError) as e:
        gaps.append(f"{CONTEXT_FILE}: {e}")
    try:
        table = PathClassTable.from_text(table_text)
    except ValueError as e:
        gaps.append(str(e))
    if gaps:
        raise ArtifactError(gaps)

    templates: Dict[str, Dict[QueryKind, QueryTemplate]] = {}
    for segment, class_iri in sorted(table.entries.items()):
        for kind in (QueryKind.GET_ALL, QueryKind.GET_BY_ID, QueryKind.INSERT, QueryKind.UPDATE, QueryKind.DELETE):
            path = root / TEMPLATES_DIR / segment / kind.file_name
            if not path.is_file():
                continue
            try:
                template = template_from_file(
                    f"{segment}/{kind.file_name[:-3]}", kind, path.read_text(encoding="utf-8"), class_iri
                )
            except (OSError, TemplateError) as e:
                gaps.append(f"{path.relative_to(root)}: {e}")
                continue
            templates.setdefault(segment, {})[kind] = template

    artifacts = ArtifactSet(
        spec_text=spec_text,
        document=document,
        context=context,
        table=table,
        templates=templates,
    )
    gaps.extend(check_consistency(artifacts))
    if gaps:
        raise ArtifactError(gaps)
    return artifacts


def _read(path: Path, gaps: List[str]) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        gaps.append(f"{path.name}: cannot read ({e.strerror or e})")
        return ""


def check_consistency(artifacts: ArtifactSet) -> List[str]:
    """
    List the gaps between the specification and the other artifacts.

    Every route must map to a class of the table, that class must have a
    context term naming the route's schema, and every operation must have
    its template.
    """
    gaps: List[str] = []
    for route, item in sorted(artifacts.document.paths.items()):
        parts = route.strip("/").split("/")
        if len(parts) == 1:
            kinds = COLLECTION_KINDS
        elif len(parts) == 2 and parts[1] == "{id}":
            kinds = ITEM_KINDS
        else:
            gaps.append(f"{route}: not a class route")
            continue

        segment = parts[0]
        class_iri = artifacts.table.class_for(segment)
        if class_iri is None:
            gaps.append(f"{route}: segment {segment} missing from {PATHS_FILE}")
            continue

        class_name = artifacts.context.class_name(class_iri)
        if class_name is None:
            gaps.append(f"{route}: class {class_iri} missing from {CONTEXT_FILE}")
        elif class_name not in artifacts.document.schemas:
            gaps.append(f"{route}: schema {class_name} missing from {SPEC_FILE}")

        for method in sorted(item.operations):
            kind = kinds.get(method)
            if kind is None:
                gaps.append(f"{route}: unsupported operation {method.upper()}")
            elif artifacts.template(segment, kind) is None:
                gaps.append(f"{route}: {method.upper()} has no template {TEMPLATES_DIR}/{segment}/{kind.file_name}")
    return gaps
