"""
SPARQL query template service.

Generates, parses and instantiates the SPARQL operations behind the API:
- five default templates per class (get-all, get-by-id, insert, update, delete)
- ``#+ key: value`` decorator headers (YAML) and typed placeholders
- safe placeholder substitution (IRI guard, literal escaping)
- custom CONSTRUCT queries mounted as extra GET routes
"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import yaml

from models.ontology import ClassInfo
from models.query import (
    PLACEHOLDER_PATTERN,
    CustomEndpoint,
    PlaceholderBinding,
    PlaceholderSpec,
    PlaceholderType,
    QueryKind,
    QueryTemplate,
    detect_query_form,
)
from models.resource import ContextMap, PathClassTable
from utils.logger import log_debug, log_info
from utils.naming import is_absolute_iri
from utils.validator import escape_literal, validate_iri

SELECTED_MARKER = "urn:ontogate:selected"

_DECORATOR_PREFIX = "#+"
_DECORATOR_KEY = re.compile(r"^[A-Za-z_][\w-]*\s*:")
_ROUTE_SEGMENT = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._~-]*$")


class TemplateError(Exception):
    """Base exception for query template errors."""
    pass


class DecoratorParseError(TemplateError):
    """Exception for malformed ``#+`` decorator lines."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"Decorator error at line {line}: {message}")


class MissingBindingError(TemplateError):
    """Exception for required placeholders left unbound."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Missing value for required parameter {name}")


class UnsafeValueError(TemplateError):
    """Exception for values rejected by the injection guard."""

    def __init__(self, name: str, value: str, reason: str):
        self.name = name
        self.value = value
        super().__init__(f"Unsafe value for {name}: {reason}")


class BindingTypeError(TemplateError):
    """Exception for values of the wrong type."""

    def __init__(self, name: str, expected: PlaceholderType, value: Any):
        self.name = name
        self.expected = expected
        super().__init__(f"Parameter {name} expects {expected.value}, got {type(value).__name__}")


class CustomQueryError(TemplateError):
    """Exception for custom queries that cannot be mounted."""

    def __init__(self, route: str, message: str):
        self.route = route
        super().__init__(f"Custom query {route}: {message}")


@dataclass(frozen=True)
class DecoratedQuery:
    """
    A query file split into decorators and body.

    Attributes:
        summary: ``summary`` decorator, if any
        metadata: Every decorator
        placeholders: Placeholders of the body in order of appearance
        body: Query text without the decorator header
    """

    summary: Optional[str]
    metadata: Dict[str, Any] = field(default_factory=dict)
    placeholders: Tuple[PlaceholderSpec, ...] = ()
    body: str = ""


_RDFS_PREFIX = "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"

_GET_BY_ID = _RDFS_PREFIX + """CONSTRUCT {
    ?_resource_iri ?predicate ?prop .
    ?prop a ?type .
    ?prop rdfs:label ?label
}
WHERE {
    ?_resource_iri ?predicate ?prop
    OPTIONAL {
        ?prop  a ?type
        OPTIONAL {
            ?prop rdfs:label ?label
        }
    }
}
"""

_GET_ALL = _RDFS_PREFIX + """CONSTRUCT {
    ?item <""" + SELECTED_MARKER + """> true .
    ?item ?predicate ?prop .
    ?prop a ?type .
    ?prop rdfs:label ?label
}
WHERE {
    {
        SELECT DISTINCT ?item
        WHERE {
            ?item a <{class_iri}> .
            OPTIONAL { ?item rdfs:label ?itemLabel }
            FILTER(?__label = "" || (BOUND(?itemLabel) && CONTAINS(LCASE(STR(?itemLabel)), LCASE(?__label))))
        }
        ORDER BY ASC(STR(?item))
        LIMIT ?_per_page_int
        OFFSET ?_offset_int
    }
    ?item ?predicate ?prop
    OPTIONAL {
        ?prop a ?type
        OPTIONAL {
            ?prop rdfs:label ?label
        }
    }
}
"""

_INSERT = """INSERT DATA {
    GRAPH ?_graph_iri {
        ?_triples_nt
    }
}
"""

_UPDATE = """DELETE {
    GRAPH ?_graph_iri {
        ?_resource_iri ?predicate ?object
    }
}
WHERE {
    GRAPH ?_graph_iri {
        ?_resource_iri ?predicate ?object
    }
} ;
INSERT DATA {
    GRAPH ?_graph_iri {
        ?_triples_nt
    }
}
"""

_DELETE = """DELETE WHERE {
    GRAPH ?_graph_iri {
        ?_resource_iri ?predicate ?object
    }
}
"""


def generate_default_templates(cls: ClassInfo, route_segment: str) -> List[QueryTemplate]:
    """
    Build the five CRUD templates of a class.

    Args:
        cls: Class the templates serve
        route_segment: Plural path segment (template names are prefixed by it)

    Returns:
        Templates in kind order: get-all, get-by-id, insert, update, delete

    Examples:
        >>> [t.kind.value for t in generate_default_templates(region, "regions")]
        ['get-all', 'get-by-id', 'insert', 'update', 'delete']
    """
    ok, reason = validate_iri(cls.iri)
    if not ok:
        raise TemplateError(f"Class IRI cannot be used in a query: {cls.iri} ({reason})")

    name = cls.local_name
    sources = (
        (QueryKind.GET_ALL, _GET_ALL.replace("{class_iri}", cls.iri), f"List all instances of {name}"),
        (QueryKind.GET_BY_ID, _GET_BY_ID, "Return resource information by its resource_iri"),
        (QueryKind.INSERT, _INSERT, f"Insert a new {name} into a named graph"),
        (QueryKind.UPDATE, _UPDATE, f"Replace the outgoing triples of a {name}"),
        (QueryKind.DELETE, _DELETE, f"Delete the outgoing triples of a {name}"),
    )

    return [
        QueryTemplate(
            name=f"{route_segment}/{kind.file_name[:-3]}",
            kind=kind,
            text=text,
            placeholders=scan_placeholders(text),
            summary=summary,
            metadata={"summary": summary},
            class_iri=cls.iri,
        )
        for kind, text, summary in sources
    ]


def scan_placeholders(body: str) -> Tuple[PlaceholderSpec, ...]:
    """
    Placeholders of a query body in order of first appearance.

    Raises:
        TemplateError: If a name is used both required and optional, or an
            iri placeholder is optional
    """
    specs: Dict[str, PlaceholderSpec] = {}
    for match in PLACEHOLDER_PATTERN.finditer(body):
        spec = PlaceholderSpec.from_token(match.group(1), match.group(2))
        known = specs.get(spec.name)
        if known is not None:
            if known.required != spec.required:
                raise TemplateError(f"Placeholder {spec.name} is used both required and optional")
            continue
        if spec.type is PlaceholderType.IRI and not spec.required:
            raise TemplateError(f"IRI placeholder {spec.name} cannot be optional")
        specs[spec.name] = spec
    return tuple(specs.values())


def parse_decorators(text: str) -> DecoratedQuery:
    """
    Split a decorated query file into metadata, placeholders and body.

    Leading ``#+`` lines form a YAML mapping (``#+ summary: ...``).

    Args:
        text: Query file contents

    Returns:
        DecoratedQuery

    Raises:
        DecoratorParseError: If a decorator line is malformed (1-based line)
        TemplateError: If placeholders are inconsistent

    Examples:
        >>> parsed = parse_decorators("#+ summary: Regions\\nCONSTRUCT { ?_r_iri ?p ?o } WHERE { ?_r_iri ?p ?o }")
        >>> parsed.summary, [p.name for p in parsed.placeholders]
        ('Regions', ['r_iri'])
    """
    lines = text.splitlines(keepends=True)
    header: List[str] = []
    index = 0
    while index < len(lines) and lines[index].lstrip().startswith(_DECORATOR_PREFIX):
        content = lines[index].lstrip()[len(_DECORATOR_PREFIX):].rstrip("\r\n")
        if content.startswith(" "):
            content = content[1:]
        stripped = content.strip()
        if stripped and not content[0].isspace() and not stripped.startswith("-"):
            if not _DECORATOR_KEY.match(stripped):
                raise DecoratorParseError(index + 1, f"expected 'key: value', got {stripped!r}")
        header.append(content)
        index += 1

    metadata: Dict[str, Any] = {}
    if header:
        try:
            loaded = yaml.safe_load("\n".join(header))
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else 1
            raise DecoratorParseError(min(line, len(header)), str(getattr(e, "problem", None) or e))
        if loaded is not None and not isinstance(loaded, dict):
            raise DecoratorParseError(1, "decorators must form a key/value mapping")
        metadata = dict(loaded or {})

    body = "".join(lines[index:])
    summary = metadata.get("summary")
    return DecoratedQuery(
        summary=str(summary) if summary is not None else None,
        metadata=metadata,
        placeholders=scan_placeholders(body),
        body=body,
    )


def render_template_file(template: QueryTemplate) -> str:
    """
    Serialize a template as a decorated ``.rq`` file.

    Examples:
        >>> render_template_file(get_by_id).splitlines()[0]
        '#+ summary: Return resource information by its resource_iri'
    """
    metadata = dict(template.metadata)
    if template.summary is not None:
        metadata.setdefault("summary", template.summary)
    if not metadata:
        return template.text
    header = yaml.safe_dump(metadata, sort_keys=True, default_flow_style=False, allow_unicode=True, width=math.inf)
    prefixed = "".join(f"{_DECORATOR_PREFIX} {line}\n" for line in header.splitlines())
    return prefixed + template.text


def template_from_file(name: str, kind: QueryKind, text: str, class_iri: Optional[str] = None) -> QueryTemplate:
    """Build a template from decorated file contents."""
    parsed = parse_decorators(text)
    try:
        return QueryTemplate(
            name=name,
            kind=kind,
            text=parsed.body,
            placeholders=parsed.placeholders,
            summary=parsed.summary,
            metadata=parsed.metadata,
            class_iri=class_iri,
        )
    except ValueError as e:
        raise TemplateError(str(e))


def instantiate(
    template: QueryTemplate,
    bindings: Union[Sequence[PlaceholderBinding], Mapping[str, Any]]
) -> str:
    """
    Substitute placeholder values into a template.

    Args:
        template: Template to fill
        bindings: PlaceholderBinding list or name to value mapping

    Returns:
        SPARQL text without placeholder tokens

    Raises:
        MissingBindingError: If a required placeholder is unbound
        UnsafeValueError: If an IRI fails the injection guard
        BindingTypeError: If a value has the wrong type
        TemplateError: If a binding names no placeholder of the template

    Examples:
        >>> instantiate(get_by_id, [PlaceholderBinding("resource_iri", "https://ex.org/i/Texas")])
        'PREFIX rdfs: ... <https://ex.org/i/Texas> ?predicate ?prop ...'
    """
    if isinstance(bindings, Mapping):
        values = dict(bindings)
    else:
        values = {b.name: b.value for b in bindings}

    unknown = sorted(set(values) - {p.name for p in template.placeholders})
    if unknown:
        raise TemplateError(f"Template {template.name} has no placeholder {', '.join(unknown)}")

    rendered: Dict[str, str] = {}
    for spec in template.placeholders:
        if spec.name in values and values[spec.name] is not None:
            rendered[spec.name] = render_value(spec, values[spec.name])
        elif spec.required:
            raise MissingBindingError(spec.name)
        else:
            rendered[spec.name] = _unbound_default(spec)

    query = PLACEHOLDER_PATTERN.sub(lambda m: rendered[m.group(2)], template.text)
    log_debug(message=f"Instantiated {template.name}", extra={"bindings": sorted(values)})
    return query


def render_value(spec: PlaceholderSpec, value: Any) -> str:
    """Render one value as SPARQL syntax for its placeholder type."""
    if spec.type is PlaceholderType.IRI:
        if not isinstance(value, str):
            raise BindingTypeError(spec.name, spec.type, value)
        ok, reason = validate_iri(value)
        if not ok:
            raise UnsafeValueError(spec.name, value, reason)
        return f"<{value}>"

    if spec.type is PlaceholderType.INTEGER:
        if isinstance(value, bool) or not isinstance(value, int):
            raise BindingTypeError(spec.name, spec.type, value)
        return str(value)

    if not isinstance(value, str):
        raise BindingTypeError(spec.name, spec.type, value)

    if spec.type is PlaceholderType.TRIPLES:
        return value
    return f'"{escape_literal(value)}"'


def _unbound_default(spec: PlaceholderSpec) -> str:
    if spec.type is PlaceholderType.INTEGER:
        return "0"
    if spec.type is PlaceholderType.TRIPLES:
        return ""
    return '""'


def normalize_route(route: str) -> str:
    """
    Validate a custom route and return it with a single leading slash.

    Raises:
        CustomQueryError: If a segment is empty or not URL-safe
    """
    segments = route.strip("/").split("/")
    if not segments or any(not _ROUTE_SEGMENT.match(s) for s in segments):
        raise CustomQueryError(route, "route segments must be non-empty and URL-safe")
    return "/" + "/".join(segments)


def register_custom_query(
    route: str,
    text: str,
    table: PathClassTable,
    context: ContextMap,
    taken_routes: Iterable[str] = ()
) -> CustomEndpoint:
    """
    Turn a decorated CONSTRUCT query into a GET endpoint descriptor.

    The response class comes from the ``class`` decorator (local name or
    IRI) or, failing that, from the class of the route's first segment.
    Query parameters are named after the placeholders.

    Args:
        route: Route to mount (e.g. /regions/part-of-europe)
        text: Decorated query text
        table: Path/class table of the compiled API
        context: JSON-LD context of the compiled API
        taken_routes: Routes already served

    Returns:
        CustomEndpoint

    Raises:
        CustomQueryError: If the query is not CONSTRUCT, declares triples
            placeholders, collides with a route or has no resolvable class
        DecoratorParseError: If the decorators are malformed
    """
    route = normalize_route(route)
    if route in set(taken_routes):
        raise CustomQueryError(route, "route already served")

    parsed = parse_decorators(text)
    form = detect_query_form(parsed.body)
    if form != "CONSTRUCT":
        raise CustomQueryError(route, f"only CONSTRUCT queries can be mounted, got {form}")

    triples = [p.name for p in parsed.placeholders if p.type is PlaceholderType.TRIPLES]
    if triples:
        raise CustomQueryError(route, f"triples placeholders are not allowed ({', '.join(triples)})")

    class_iri = _custom_query_class(route, parsed.metadata.get("class"), table, context)

    template = QueryTemplate(
        name=route.lstrip("/"),
        kind=QueryKind.CUSTOM,
        text=parsed.body,
        placeholders=parsed.placeholders,
        summary=parsed.summary,
        metadata=parsed.metadata,
        class_iri=class_iri,
    )
    endpoint = CustomEndpoint(
        route=route,
        template=template,
        class_iri=class_iri,
        parameters={p.name: p for p in parsed.placeholders},
    )
    log_info(
        message=f"Custom query registered: {route}",
        extra={"route": route, "class": class_iri, "parameters": sorted(endpoint.parameters)}
    )
    return endpoint


def _custom_query_class(
    route: str,
    declared: Optional[Any],
    table: PathClassTable,
    context: ContextMap
) -> str:
    if declared is not None:
        declared = str(declared)
        class_iri = declared if is_absolute_iri(declared) else context.class_iri(declared)
        if class_iri is None or table.segment_for(class_iri) is None:
            raise CustomQueryError(route, f"class {declared} is not part of the API")
        return class_iri

    first_segment = route.strip("/").split("/")[0]
    class_iri = table.class_for(first_segment)
    if class_iri is None:
        raise CustomQueryError(route, "no 'class' decorator and the first route segment names no class")
    return class_iri


def load_custom_queries(
    directory: Union[str, Path],
    table: PathClassTable,
    context: ContextMap,
    taken_routes: Iterable[str] = ()
) -> List[CustomEndpoint]:
    """
    Register every ``.rq`` file under a directory.

    The relative path without extension is the route:
    ``regions/part-of-europe.rq`` serves ``/regions/part-of-europe``.

    Raises:
        CustomQueryError: If a file cannot be read or registered
    """
    root = Path(directory)
    if not root.is_dir():
        raise CustomQueryError(str(root), "custom query directory not found")

    taken = set(taken_routes)
    endpoints: List[CustomEndpoint] = []
    for path in sorted(root.rglob("*.rq")):
        route = "/" + path.relative_to(root).with_suffix("").as_posix()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise CustomQueryError(route, f"cannot read {path}: {e.strerror or e}")
        try:
            endpoint = register_custom_query(route, text, table, context, taken)
        except DecoratorParseError as e:
            raise CustomQueryError(route, f"{path}: {e}")
        taken.add(endpoint.route)
        endpoints.append(endpoint)
    return endpoints
