"""
Ontology loading service.

Parses OWL/RDFS documents (Turtle or RDF/XML, from disk or HTTP) and
extracts the normalized class/property model used by the compiler:
- owl:Class / rdfs:Class declarations with comments and superclasses
- owl:ObjectProperty / owl:DatatypeProperty with domains and ranges
- owl:unionOf domain and range expressions expanded into named classes
"""

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Union

import httpx
from rdflib import BNode, Graph, Literal, URIRef
from rdflib.collection import Collection
from rdflib.namespace import OWL, RDF, RDFS, XSD

from config.settings import SPARQL_TIMEOUT_SECONDS
from models.ontology import ClassInfo, OntologyModel, PropertyInfo, PropertyKind
from utils.logger import log_debug, log_info, log_warning
from utils.naming import local_name


class OntologyError(Exception):
    """Base exception for ontology errors."""
    pass


class OntologyLoadError(OntologyError):
    """Exception for documents that cannot be read or parsed."""

    def __init__(self, document: str, message: str, line: Optional[int] = None):
        self.document = document
        self.line = line
        where = f"{document}, line {line}" if line is not None else document
        super().__init__(f"Cannot load {where}: {message}")


class DuplicateLocalNameError(OntologyError):
    """Exception for two classes sharing a local name."""

    def __init__(self, first_iri: str, second_iri: str):
        self.iris = (first_iri, second_iri)
        super().__init__(
            f"Classes {first_iri} and {second_iri} share the local name "
            f"{local_name(first_iri)!r}"
        )


class UnknownClassError(OntologyError):
    """Exception for class IRIs absent from the model."""

    def __init__(self, iri: str):
        self.iri = iri
        super().__init__(f"Class not found in ontology: {iri}")


class OntologySyntax(Enum):
    """Supported RDF serializations."""
    TURTLE = "turtle"
    RDF_XML = "rdf-xml"

    @property
    def rdflib_format(self) -> str:
        return "turtle" if self is OntologySyntax.TURTLE else "xml"


@dataclass(frozen=True)
class OntologySource:
    """A document location with an optional explicit syntax."""

    location: str
    syntax: Optional[OntologySyntax] = None


_EXTENSION_SYNTAX = {
    ".ttl": OntologySyntax.TURTLE,
    ".owl": OntologySyntax.RDF_XML,
    ".rdf": OntologySyntax.RDF_XML,
    ".xml": OntologySyntax.RDF_XML,
}

_CONTENT_TYPE_SYNTAX = {
    "text/turtle": OntologySyntax.TURTLE,
    "application/x-turtle": OntologySyntax.TURTLE,
    "application/rdf+xml": OntologySyntax.RDF_XML,
    "application/xml": OntologySyntax.RDF_XML,
    "text/xml": OntologySyntax.RDF_XML,
}

_RESERVED_NAMESPACES = (str(RDF), str(RDFS), str(OWL), str(XSD))

_LINE_IN_MESSAGE = re.compile(r"line (\d+)")


def syntax_for(location: str) -> Optional[OntologySyntax]:
    """
    Select the syntax of a document from its file extension.

    Examples:
        >>> syntax_for("ontology.ttl")
        <OntologySyntax.TURTLE: 'turtle'>
        >>> syntax_for("https://example.org/onto.owl")
        <OntologySyntax.RDF_XML: 'rdf-xml'>
    """
    path = location.split("?", 1)[0].split("#", 1)[0]
    return _EXTENSION_SYNTAX.get(Path(path).suffix.lower())


def load_ontology(
    documents: Sequence[Union[str, Path, OntologySource]]
) -> OntologyModel:
    """
    Load RDF documents and extract the class/property model.

    Args:
        documents: File paths, http(s) URLs or OntologySource entries,
            parsed in the given order into one graph

    Returns:
        Immutable OntologyModel

    Raises:
        OntologyLoadError: If a document cannot be read or parsed
        DuplicateLocalNameError: If two classes share a local name

    Examples:
        >>> model = load_ontology(["tests/fixtures/region.ttl"])
        >>> sorted(c.local_name for c in model.classes)
        ['Region']
    """
    graph = Graph()
    for document in documents:
        source = document if isinstance(document, OntologySource) else OntologySource(str(document))
        _parse_into(graph, source)

    model = extract_model(graph)
    log_info(
        message="Ontology loaded",
        extra={
            "documents": [str(d.location if isinstance(d, OntologySource) else d) for d in documents],
            "classes": len(model.classes),
            "properties": len(model.properties),
        }
    )
    return model


def _parse_into(graph: Graph, source: OntologySource):
    """Parse one document into the shared graph."""
    location = source.location
    syntax = source.syntax

    if location.startswith(("http://", "https://")):
        data, fetched_syntax = _fetch(location)
        syntax = syntax or fetched_syntax or syntax_for(location)
        if syntax is None:
            raise OntologyLoadError(location, "cannot determine RDF syntax from response")
        _parse_data(graph, location, data, syntax)
        return

    path = Path(location)
    syntax = syntax or syntax_for(location)
    if syntax is None:
        raise OntologyLoadError(
            location, "unsupported extension (expected .ttl, .owl, .rdf or .xml)"
        )
    try:
        data = path.read_bytes()
    except OSError as e:
        raise OntologyLoadError(location, e.strerror or str(e))
    _parse_data(graph, location, data, syntax)


def _fetch(url: str):
    """Fetch a remote ontology, negotiating Turtle or RDF/XML."""
    try:
        response = httpx.get(
            url,
            headers={"Accept": "text/turtle, application/rdf+xml;q=0.9"},
            follow_redirects=True,
            timeout=SPARQL_TIMEOUT_SECONDS,
        )
        response.raise_for_status()
    except httpx.HTTPError as e:
        raise OntologyLoadError(url, f"download failed ({e})")

    media_type = response.headers.get("content-type", "").split(";", 1)[0].strip().lower()
    return response.content, _CONTENT_TYPE_SYNTAX.get(media_type)


def _parse_data(graph: Graph, location: str, data: bytes, syntax: OntologySyntax):
    """Parse serialized RDF, converting parser errors into OntologyLoadError."""
    try:
        graph.parse(data=data, format=syntax.rdflib_format, publicID=_public_id(location))
    except Exception as e:  # rdflib raises parser-specific exception types
        text = str(e).strip()
        message = text.splitlines()[0] if text else type(e).__name__
        raise OntologyLoadError(location, message, _error_line(e))


def _public_id(location: str) -> str:
    if location.startswith(("http://", "https://")):
        return location
    return Path(location).resolve().as_uri()


def _error_line(error: Exception) -> Optional[int]:
    """Best-effort line number for turtle (BadSyntax) and RDF/XML (SAX) errors."""
    lines = getattr(error, "lines", None)
    if isinstance(lines, int):
        return lines + 1
    get_line = getattr(error, "getLineNumber", None)
    if callable(get_line):
        return get_line()
    match = _LINE_IN_MESSAGE.search(str(error))
    return int(match.group(1)) if match else None


def extract_model(graph: Graph) -> OntologyModel:
    """
    Extract the class/property model from an already parsed graph.

    Args:
        graph: RDF graph holding the ontology

    Returns:
        OntologyModel

    Raises:
        DuplicateLocalNameError: If two classes share a local name
    """
    class_iris = _declared_classes(graph)

    by_name: Dict[str, str] = {}
    for iri in sorted(class_iris):
        name = local_name(iri)
        if not name:
            log_warning(message=f"Skipping class without local name: {iri}", extra={"class": iri})
            continue
        if name in by_name:
            raise DuplicateLocalNameError(by_name[name], iri)
        by_name[name] = iri
    class_iris = set(by_name.values())

    classes = frozenset(
        ClassInfo.from_iri(
            iri,
            comment=_pick_comment(graph, URIRef(iri)),
            direct_superclasses=_superclasses(graph, URIRef(iri), class_iris),
        )
        for iri in class_iris
    )

    properties = frozenset(_extract_properties(graph))

    return OntologyModel(
        prefixes=dict(sorted((prefix, str(ns)) for prefix, ns in graph.namespaces())),
        classes=classes,
        properties=properties,
        ontology_iris=tuple(
            sorted({str(s) for s in graph.subjects(RDF.type, OWL.Ontology) if isinstance(s, URIRef)})
        ),
    )


def _declared_classes(graph: Graph) -> Set[str]:
    found = set()
    for class_type in (OWL.Class, RDFS.Class):
        for subject in graph.subjects(RDF.type, class_type):
            if not isinstance(subject, URIRef):
                continue
            if str(subject).startswith(_RESERVED_NAMESPACES):
                continue
            found.add(str(subject))
    return found


def _superclasses(graph: Graph, subject: URIRef, in_scope: Set[str]) -> FrozenSet[str]:
    parents = set()
    for parent in graph.objects(subject, RDFS.subClassOf):
        if not isinstance(parent, URIRef):
            continue
        if str(parent) in in_scope:
            parents.add(str(parent))
        else:
            log_debug(
                message=f"Superclass out of scope for {subject}",
                extra={"class": str(subject), "superclass": str(parent)}
            )
    return frozenset(parents)


def _pick_comment(graph: Graph, subject: URIRef) -> Optional[str]:
    """
    Choose one rdfs:comment deterministically.

    English-tagged comments win, then untagged ones, then any language;
    within the chosen group the lexicographically first value is used.
    """
    comments = [c for c in graph.objects(subject, RDFS.comment) if isinstance(c, Literal)]
    if not comments:
        return None

    english = [c for c in comments if c.language and (c.language.lower() == "en" or c.language.lower().startswith("en-"))]
    untagged = [c for c in comments if not c.language]
    group = english or untagged or comments
    return min(str(c) for c in group).strip()


def _extract_properties(graph: Graph) -> Iterable[PropertyInfo]:
    object_iris = {s for s in graph.subjects(RDF.type, OWL.ObjectProperty) if isinstance(s, URIRef)}
    datatype_iris = {s for s in graph.subjects(RDF.type, OWL.DatatypeProperty) if isinstance(s, URIRef)}

    for both in sorted(object_iris & datatype_iris):
        log_warning(
            message=f"Property declared both object and datatype, treated as object: {both}",
            extra={"property": str(both)}
        )

    functional = set(graph.subjects(RDF.type, OWL.FunctionalProperty))

    for subject in sorted(object_iris | datatype_iris):
        name = local_name(str(subject))
        if not name:
            log_warning(message=f"Skipping property without local name: {subject}")
            continue
        kind = PropertyKind.OBJECT if subject in object_iris else PropertyKind.DATATYPE
        yield PropertyInfo(
            iri=str(subject),
            local_name=name,
            kind=kind,
            comment=_pick_comment(graph, subject),
            domains=_named_members(graph, subject, RDFS.domain),
            ranges=_named_members(graph, subject, RDFS.range),
            functional=subject in functional,
        )


def _named_members(graph: Graph, prop: URIRef, axis: URIRef) -> FrozenSet[str]:
    """
    Collect named classes of a domain/range axis, expanding top-level unions.

    Intersections and other anonymous expressions are ignored with a warning.
    """
    members: Set[str] = set()
    axis_name = "domain" if axis == RDFS.domain else "range"

    for value in graph.objects(prop, axis):
        if isinstance(value, URIRef):
            members.add(str(value))
            continue
        if not isinstance(value, BNode):
            continue

        union = graph.value(value, OWL.unionOf)
        if union is not None:
            for member in Collection(graph, union):
                if isinstance(member, URIRef):
                    members.add(str(member))
                else:
                    log_warning(
                        message=f"Ignoring nested expression in {axis_name} union of {prop}",
                        extra={"property": str(prop), "axis": axis_name}
                    )
            continue

        if graph.value(value, OWL.intersectionOf) is not None:
            log_warning(
                message=f"Ignoring intersection in {axis_name} of {prop}",
                extra={"property": str(prop), "axis": axis_name}
            )
        else:
            log_warning(
                message=f"Ignoring anonymous {axis_name} expression of {prop}",
                extra={"property": str(prop), "axis": axis_name}
            )

    return frozenset(members)


def superclass_closure(model: OntologyModel, class_iri: str) -> FrozenSet[str]:
    """
    Transitive closure over direct superclasses, excluding the class itself.

    Args:
        model: Ontology model
        class_iri: Class IRI

    Returns:
        Set of superclass IRIs (terminates on cycles)

    Raises:
        UnknownClassError: If the class is not in the model

    Examples:
        >>> superclass_closure(model, "https://example.org/A")  # A ⊑ B ⊑ C
        frozenset({'https://example.org/B', 'https://example.org/C'})
    """
    start = model.get_class(class_iri)
    if start is None:
        raise UnknownClassError(class_iri)

    visited: Set[str] = set()
    stack: List[str] = list(start.direct_superclasses)
    while stack:
        current = stack.pop()
        if current in visited:
            continue
        visited.add(current)
        info = model.get_class(current)
        if info is not None:
            stack.extend(info.direct_superclasses - visited)

    visited.discard(class_iri)
    return frozenset(visited)


def effective_properties(
    model: OntologyModel,
    class_iri: str,
    include_undomained: bool = False
) -> FrozenSet[PropertyInfo]:
    """
    Properties applicable to a class, including inherited ones.

    A property applies when its domains contain the class or any of its
    transitive superclasses. Properties without a domain only apply when
    include_undomained is set.

    Args:
        model: Ontology model
        class_iri: Class IRI
        include_undomained: Attach properties without domain to every class

    Returns:
        Set of PropertyInfo

    Raises:
        UnknownClassError: If the class is not in the model
    """
    scope = superclass_closure(model, class_iri) | {class_iri}
    return frozenset(
        prop for prop in model.properties
        if (prop.domains & scope) or (include_undomained and not prop.domains)
    )
