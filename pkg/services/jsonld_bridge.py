"""
JSON-LD bridge.

Generates the JSON-LD context of the API and converts between RDF results
and the plain JSON resources the API serves:
- context generation (classes, object and datatype properties)
- depth-1 framing of CONSTRUCT results into ResourceEnvelopes
- envelope to triples conversion for writes
- id codec between instance IRIs and API ids
"""

import math
from typing import Any, Collection, Dict, Iterable, List, Optional, Set

from rdflib import BNode, Graph, Literal, URIRef
from rdflib.namespace import RDF, RDFS

from models.api_spec import ScalarType
from models.ontology import OntologyModel
from models.resource import (
    DEFAULT_FIELDS,
    ContextMap,
    ContextTerm,
    ResourceEnvelope,
    TermKind,
)
from services.ontology_loader import effective_properties
from services.query_templates import SELECTED_MARKER
from services.spec_compiler import datatype_to_scalar, in_scope_ranges
from utils.logger import log_warning
from utils.naming import is_absolute_iri, local_name
from utils.validator import validate_iri

_MARKER = URIRef(SELECTED_MARKER)


class EnvelopeValidationError(Exception):
    """Exception for resources that cannot be converted to triples."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


def encode_id(iri: str, instance_prefix: str) -> str:
    """
    Shorten an instance IRI to its API id.

    Examples:
        >>> encode_id("https://ex.org/i/Texas", "https://ex.org/i/")
        'Texas'
        >>> encode_id("http://dbpedia.org/resource/Texas", "https://ex.org/i/")
        'http://dbpedia.org/resource/Texas'
    """
    if iri.startswith(instance_prefix):
        suffix = iri[len(instance_prefix):]
        if suffix and not is_absolute_iri(suffix):
            return suffix
    return iri


def decode_id(resource_id: str, instance_prefix: str) -> str:
    """Inverse of encode_id: absolute ids pass through, others get the prefix."""
    if is_absolute_iri(resource_id):
        return resource_id
    return instance_prefix + resource_id


def generate_context(
    model: OntologyModel,
    included: Iterable[str],
    include_undomained: bool = False
) -> ContextMap:
    """
    Build the JSON-LD context of the compiled classes.

    Class terms are typed ``@id``; object properties are ``@id`` sets;
    datatype properties carry their range datatype. ``id``, ``type`` and
    ``label`` follow fixed conventions.

    Args:
        model: Ontology model
        included: Class IRIs of the API
        include_undomained: Same flag used for compilation

    Returns:
        ContextMap
    """
    terms: Dict[str, ContextTerm] = {}
    properties = {}

    for class_iri in sorted(set(included)):
        cls = model.get_class(class_iri)
        if cls is None:
            continue
        terms[cls.local_name] = ContextTerm(name=cls.local_name, iri=cls.iri, kind=TermKind.CLASS)
        for prop in effective_properties(model, class_iri, include_undomained):
            properties[prop.iri] = prop

    for prop_iri in sorted(properties):
        prop = properties[prop_iri]
        if prop.is_object and not in_scope_ranges(model, prop):
            continue
        name = prop.local_name
        if name in DEFAULT_FIELDS or name in terms:
            log_warning(
                message=f"Context term {name!r} already defined, skipping {prop.iri}",
                extra={"property": prop.iri, "term": name}
            )
            continue
        if prop.is_object:
            terms[name] = ContextTerm(name=name, iri=prop.iri, kind=TermKind.OBJECT)
        else:
            ranges = sorted(prop.ranges)
            terms[name] = ContextTerm(
                name=name,
                iri=prop.iri,
                kind=TermKind.DATATYPE,
                datatype=ranges[0] if ranges else None,
            )

    return ContextMap(terms=terms)


def select_labels(values: Iterable[Any]) -> List[str]:
    """
    Plain label strings, English preferred.

    When any English label exists, English and untagged labels are kept;
    otherwise every label. Tags are stripped, values deduplicated and sorted.
    """
    literals = [v for v in values if isinstance(v, Literal)]
    english = [v for v in literals if v.language and v.language.lower().split("-")[0] == "en"]
    if english:
        literals = english + [v for v in literals if not v.language]
    return sorted({str(v) for v in literals})


def literal_to_json(value: Literal) -> Any:
    """
    JSON value of a literal according to its own datatype.

    Ill-typed literals (e.g. "abc"^^xsd:integer) become strings.
    """
    if value.datatype is None:
        return str(value)

    scalar_type, _ = datatype_to_scalar(str(value.datatype))
    python_value = value.toPython()
    if getattr(value, "ill_typed", False) or python_value is value:
        return str(value)

    if scalar_type is ScalarType.BOOLEAN and isinstance(python_value, bool):
        return python_value
    if scalar_type is ScalarType.INTEGER and isinstance(python_value, int) and not isinstance(python_value, bool):
        return python_value
    if scalar_type is ScalarType.NUMBER:
        try:
            number = float(python_value)
        except (TypeError, ValueError):
            return str(value)
        return number if math.isfinite(number) else str(value)
    return str(value)


def _resource_types(graph: Graph, subject: Any, context: ContextMap) -> List[str]:
    names = set()
    for value in graph.objects(subject, RDF.type):
        if isinstance(value, URIRef):
            names.add(context.class_name(str(value)) or local_name(str(value)))
    return sorted(names)


def _sort_key(value: Any):
    if isinstance(value, ResourceEnvelope):
        return ("", value.id or "")
    return (type(value).__name__, value)


def _frame_roots(graph: Graph, root_class: str, root_iri: Optional[str]) -> List[URIRef]:
    marked = {s for s in graph.subjects(_MARKER, None) if isinstance(s, URIRef)}
    if marked:
        return sorted(marked, key=str)
    if root_iri is not None:
        subject = URIRef(root_iri)
        return [subject] if (subject, None, None) in graph else []
    return sorted(
        (s for s in set(graph.subjects(RDF.type, URIRef(root_class))) if isinstance(s, URIRef)),
        key=str,
    )


def frame_results(
    graph: Graph,
    root_class: str,
    root_iri: Optional[str],
    context: ContextMap,
    instance_prefix: str,
    fields: Optional[Collection[str]] = None
) -> List[ResourceEnvelope]:
    """
    Frame a CONSTRUCT result into depth-1 envelopes.

    Roots are the subjects marked as page members, else the given root
    IRI, else every subject typed with the root class. Object values become
    id/label/type stubs, literals become JSON scalars. Predicates without a
    context term (or outside ``fields``) are dropped with a warning.

    Args:
        graph: CONSTRUCT result
        root_class: Class IRI of the route
        root_iri: Single resource to frame, if any
        context: JSON-LD context of the API
        instance_prefix: Prefix used to shorten ids
        fields: Field names allowed for the root class

    Returns:
        Envelopes sorted by IRI (empty when the root is absent)

    Examples:
        >>> [e.id for e in frame_results(graph, REGION, TEXAS, context, PREFIX)]
        ['Texas']
    """
    envelopes = []
    for subject in _frame_roots(graph, root_class, root_iri):
        envelopes.append(_frame_one(graph, subject, context, instance_prefix, fields))
    return envelopes


def _frame_one(
    graph: Graph,
    subject: URIRef,
    context: ContextMap,
    instance_prefix: str,
    fields: Optional[Collection[str]]
) -> ResourceEnvelope:
    properties: Dict[str, List[Any]] = {}
    dropped: Set[str] = set()

    for predicate, value in graph.predicate_objects(subject):
        if predicate in (RDF.type, RDFS.label, _MARKER):
            continue
        term = context.property_term_for_iri(str(predicate))
        if term is None or (fields is not None and term.name not in fields):
            dropped.add(str(predicate))
            continue
        if isinstance(value, BNode):
            log_warning(
                message=f"Skipping blank node value of {predicate} on {subject}",
                extra={"subject": str(subject), "predicate": str(predicate)}
            )
            continue

        if isinstance(value, Literal):
            item: Any = literal_to_json(value)
        elif term.kind is TermKind.OBJECT:
            item = ResourceEnvelope(
                id=encode_id(str(value), instance_prefix),
                label=select_labels(graph.objects(value, RDFS.label)),
                type=_resource_types(graph, value, context),
            )
        else:
            item = str(value)

        bucket = properties.setdefault(term.name, [])
        if item not in bucket:
            bucket.append(item)

    for predicate in sorted(dropped):
        log_warning(
            message=f"Dropping predicate without a field: {predicate}",
            extra={"subject": str(subject), "predicate": predicate}
        )

    return ResourceEnvelope(
        id=encode_id(str(subject), instance_prefix),
        label=select_labels(graph.objects(subject, RDFS.label)),
        type=_resource_types(graph, subject, context),
        properties={name: sorted(values, key=_sort_key) for name, values in properties.items()},
    )


def _checked_iri(field_path: str, value: str) -> URIRef:
    ok, reason = validate_iri(value)
    if not ok:
        raise EnvelopeValidationError(field_path, reason)
    return URIRef(value)


def envelope_to_triples(
    resource: ResourceEnvelope,
    class_iri: str,
    context: ContextMap,
    instance_prefix: str,
    fields: Optional[Collection[str]] = None
) -> Graph:
    """
    Convert an envelope into the triples describing it.

    Nested envelopes contribute only the link to their id.

    Args:
        resource: Envelope with an id; nested envelopes must have ids
        class_iri: Class of the route, always asserted as rdf:type
        context: JSON-LD context of the API
        instance_prefix: Prefix used to expand relative ids
        fields: Field names allowed for the class

    Returns:
        rdflib Graph with the resource triples

    Raises:
        EnvelopeValidationError: If a field is unknown, a value has the
            wrong type or an id is missing or unsafe

    Examples:
        >>> len(envelope_to_triples(ResourceEnvelope(id="Texas", label=["Texas"]), REGION, context, PREFIX))
        2
    """
    if not resource.id:
        raise EnvelopeValidationError("id", "resource has no id")
    subject = _checked_iri("id", decode_id(resource.id, instance_prefix))

    graph = Graph()
    graph.add((subject, RDF.type, URIRef(class_iri)))

    for index, name in enumerate(resource.type):
        type_iri = context.class_iri(name) or (name if is_absolute_iri(name) else None)
        if type_iri is None:
            raise EnvelopeValidationError(f"type/{index}", f"unknown class {name!r}")
        graph.add((subject, RDF.type, _checked_iri(f"type/{index}", type_iri)))

    for label in resource.label:
        graph.add((subject, RDFS.label, Literal(label)))

    for name in sorted(resource.properties):
        term = context.term(name)
        if term is None or term.kind not in (TermKind.OBJECT, TermKind.DATATYPE) or (
            fields is not None and name not in fields
        ):
            raise EnvelopeValidationError(name, "field not in schema")
        predicate = URIRef(term.iri)
        for index, value in enumerate(resource.properties[name]):
            path = f"{name}/{index}"
            if term.kind is TermKind.OBJECT:
                if not isinstance(value, ResourceEnvelope):
                    raise EnvelopeValidationError(path, "expected a nested resource")
                if not value.id:
                    raise EnvelopeValidationError(path, "nested resource has no id")
                graph.add((subject, predicate, _checked_iri(path, decode_id(value.id, instance_prefix))))
            else:
                graph.add((subject, predicate, _scalar_literal(path, value, term)))

    return graph


def _scalar_literal(path: str, value: Any, term: ContextTerm) -> Literal:
    if isinstance(value, ResourceEnvelope) or value is None:
        raise EnvelopeValidationError(path, "expected a scalar value")

    if term.datatype is None:
        if not isinstance(value, str):
            raise EnvelopeValidationError(path, f"expected string, got {type(value).__name__}")
        return Literal(value)

    scalar_type, _ = datatype_to_scalar(term.datatype)
    datatype = URIRef(term.datatype)
    if scalar_type is ScalarType.BOOLEAN:
        valid = isinstance(value, bool)
    elif scalar_type is ScalarType.INTEGER:
        valid = isinstance(value, int) and not isinstance(value, bool)
    elif scalar_type is ScalarType.NUMBER:
        valid = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        valid = isinstance(value, str)
    if not valid:
        raise EnvelopeValidationError(path, f"expected {scalar_type.value}, got {type(value).__name__}")

    if scalar_type is ScalarType.BOOLEAN:
        return Literal("true" if value else "false", datatype=datatype)
    return Literal(str(value), datatype=datatype)
