"""
Specification compiler.

Turns an OntologyModel into an OpenAPI 3.0 document:
- one schema per class (id/label/type plus effective properties)
- a collection route and an item route per class
- class-subset filtering closed over ranges and superclasses
- deterministic YAML serialization
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import yaml
from rdflib.namespace import XSD

from config.settings import API_TITLE, API_VERSION, DEFAULT_PER_PAGE, MAX_PER_PAGE, OPENAPI_VERSION
from models.api_spec import (
    ApiSpecDocument,
    OperationSpec,
    ParameterSpec,
    PathItem,
    PropertySchema,
    ResponseArity,
    ScalarType,
    SchemaObject,
    ValueShape,
)
from models.ontology import ClassInfo, OntologyModel, PropertyInfo
from models.query import CustomEndpoint, PlaceholderType
from services.ontology_loader import UnknownClassError, effective_properties, superclass_closure
from utils.logger import log_info, log_warning
from utils.naming import local_name, pluralize


class SpecCompileError(Exception):
    """Base exception for compilation errors."""
    pass


class PathCollisionError(SpecCompileError):
    """Exception for classes that pluralize to the same route."""

    def __init__(self, route: str, class_iris: Iterable[str]):
        self.route = route
        self.class_iris = tuple(sorted(class_iris))
        super().__init__(f"Route {route} is produced by several classes: {', '.join(self.class_iris)}")


class UnknownFilterClassError(SpecCompileError):
    """Exception for filter entries that are not classes of the model."""

    def __init__(self, iris: Iterable[str]):
        self.iris = tuple(sorted(iris))
        super().__init__(f"Filter classes not found in ontology: {', '.join(self.iris)}")


DEFAULT_FIELDS = ("id", "label", "type")

LABEL_DESCRIPTION = "Human readable description of the resource"
TYPE_DESCRIPTION = "type of the resource"

_DATATYPES: Dict[str, Tuple[ScalarType, Optional[str]]] = {
    str(XSD.string): (ScalarType.STRING, None),
    str(XSD.integer): (ScalarType.INTEGER, None),
    str(XSD.int): (ScalarType.INTEGER, None),
    str(XSD.long): (ScalarType.INTEGER, None),
    str(XSD.float): (ScalarType.NUMBER, None),
    str(XSD.double): (ScalarType.NUMBER, None),
    str(XSD.decimal): (ScalarType.NUMBER, None),
    str(XSD.boolean): (ScalarType.BOOLEAN, None),
    str(XSD.dateTime): (ScalarType.STRING, "date-time"),
    str(XSD.anyURI): (ScalarType.STRING, "uri"),
}


@dataclass(frozen=True)
class CompilerConfig:
    """
    Options for compile_spec.

    Attributes:
        title: info.title of the document
        version: info.version of the document
        filter: Class IRIs of interest (None = every class)
        include_undomained: Attach properties without domain to every class
        server_url: Optional servers entry
    """

    title: str = API_TITLE
    version: str = API_VERSION
    filter: Optional[FrozenSet[str]] = None
    include_undomained: bool = False
    server_url: Optional[str] = None


def path_name(cls: ClassInfo) -> str:
    """
    Plural, lowercase path segment of a class.

    Examples:
        >>> path_name(ClassInfo.from_iri("https://example.org/Region"))
        'regions'
        >>> path_name(ClassInfo.from_iri("https://example.org/Entity"))
        'entities'
    """
    return pluralize(cls.local_name.lower())


def datatype_to_scalar(datatype_iri: str) -> Tuple[ScalarType, Optional[str]]:
    """
    Map an XSD datatype onto a JSON scalar type and format.

    Unknown datatypes map to plain strings.

    Examples:
        >>> datatype_to_scalar("http://www.w3.org/2001/XMLSchema#dateTime")
        (<ScalarType.STRING: 'string'>, 'date-time')
    """
    return _DATATYPES.get(datatype_iri, (ScalarType.STRING, None))


def class_to_schema(
    model: OntologyModel,
    class_iri: str,
    include_undomained: bool = False
) -> SchemaObject:
    """
    Build the schema object of a class.

    Args:
        model: Ontology model
        class_iri: Class IRI
        include_undomained: Attach properties without domain

    Returns:
        SchemaObject with id, the effective properties, label and type

    Raises:
        UnknownClassError: If the class is not in the model
    """
    cls = model.get_class(class_iri)
    if cls is None:
        raise UnknownClassError(class_iri)

    fields: Dict[str, PropertySchema] = {
        "id": PropertySchema(
            name="id",
            value_shape=ValueShape.SCALAR,
            scalar_type=ScalarType.STRING,
            nullable=False,
        )
    }

    for prop in sorted(effective_properties(model, class_iri, include_undomained), key=lambda p: p.iri):
        field = _property_field(model, cls, prop)
        if field is None:
            continue
        if field.name in DEFAULT_FIELDS or field.name in fields:
            log_warning(
                message=f"Field {field.name!r} of {cls.local_name} already defined, skipping {prop.iri}",
                extra={"class": class_iri, "property": prop.iri}
            )
            continue
        fields[field.name] = field

    ordered = {"id": fields.pop("id")}
    ordered.update(sorted(fields.items()))
    ordered["label"] = PropertySchema(
        name="label",
        value_shape=ValueShape.ARRAY_OF_SCALAR,
        scalar_type=ScalarType.STRING,
        description=LABEL_DESCRIPTION,
    )
    ordered["type"] = PropertySchema(
        name="type",
        value_shape=ValueShape.ARRAY_OF_SCALAR,
        scalar_type=ScalarType.STRING,
        description=TYPE_DESCRIPTION,
    )

    return SchemaObject(name=cls.local_name, description=cls.comment, properties=ordered)


def in_scope_ranges(model: OntologyModel, prop: PropertyInfo) -> List[str]:
    """Named range classes of an object property that the model declares, in IRI order."""
    return sorted(r for r in prop.ranges if model.has_class(r))


def _property_field(model: OntologyModel, cls: ClassInfo, prop: PropertyInfo) -> Optional[PropertySchema]:
    if prop.is_object:
        ranges = in_scope_ranges(model, prop)
        if not ranges:
            log_warning(
                message=f"Object property {prop.iri} has no range in scope, left out of {cls.local_name}",
                extra={"class": cls.iri, "property": prop.iri}
            )
            return None
        if len(ranges) > 1:
            log_warning(
                message=f"Object property {prop.iri} has several ranges, using {ranges[0]}",
                extra={"property": prop.iri, "ranges": ranges}
            )
        return PropertySchema(
            name=prop.local_name,
            value_shape=ValueShape.ARRAY_OF_REF,
            ref_target=local_name(ranges[0]),
            description=prop.comment,
        )

    ranges = sorted(prop.ranges)
    if len(ranges) > 1:
        log_warning(
            message=f"Datatype property {prop.iri} has several ranges, using {ranges[0]}",
            extra={"property": prop.iri, "ranges": ranges}
        )
    scalar_type, scalar_format = datatype_to_scalar(ranges[0]) if ranges else (ScalarType.STRING, None)
    return PropertySchema(
        name=prop.local_name,
        value_shape=ValueShape.ARRAY_OF_SCALAR,
        scalar_type=scalar_type,
        scalar_format=scalar_format,
        description=prop.comment,
    )


def select_classes(
    model: OntologyModel,
    filter: Optional[Iterable[str]] = None,
    include_undomained: bool = False
) -> FrozenSet[str]:
    """
    Close a class filter over superclasses and object property ranges.

    Args:
        model: Ontology model
        filter: Class IRIs of interest; None selects every class
        include_undomained: Must match the flag used for schemas

    Returns:
        Set of included class IRIs

    Raises:
        UnknownFilterClassError: If filter entries are not classes of the model

    Examples:
        >>> select_classes(model, {BAND})  # Band -origin-> Country ⊑ Place
        frozenset({BAND, COUNTRY, PLACE})
    """
    if filter is None:
        return frozenset(c.iri for c in model.classes)

    requested = set(filter)
    unknown = [iri for iri in requested if not model.has_class(iri)]
    if unknown:
        raise UnknownFilterClassError(unknown)

    included: Set[str] = set()
    pending = sorted(requested)
    while pending:
        current = pending.pop()
        if current in included:
            continue
        included.add(current)

        reachable = set(superclass_closure(model, current))
        for prop in effective_properties(model, current, include_undomained):
            if prop.is_object:
                reachable.update(in_scope_ranges(model, prop))
        pending.extend(sorted(reachable - included))

    return frozenset(included)


def _page_parameters() -> Tuple[ParameterSpec, ...]:
    return (
        ParameterSpec(
            name="label",
            location="query",
            required=False,
            schema={"type": "string"},
            description="Filter resources whose label contains this text (case-insensitive)",
        ),
        ParameterSpec(
            name="page",
            location="query",
            required=False,
            schema={"type": "integer", "minimum": 1, "default": 1},
            description="Page number",
        ),
        ParameterSpec(
            name="per_page",
            location="query",
            required=False,
            schema={"type": "integer", "minimum": 1, "maximum": MAX_PER_PAGE, "default": DEFAULT_PER_PAGE},
            description="Items per page",
        ),
    )


def _id_parameter(name: str) -> ParameterSpec:
    return ParameterSpec(
        name="id",
        location="path",
        required=True,
        schema={"type": "string"},
        description=f"The ID of the {name} to be retrieved",
    )


def build_paths(cls: ClassInfo) -> Tuple[PathItem, PathItem]:
    """
    Collection and item path items of a class.

    The collection route serves GET (paginated, label-filtered array) and
    POST; the item route serves GET, PUT and DELETE.

    Examples:
        >>> collection, item = build_paths(region)
        >>> collection.route, item.route
        ('/regions', '/regions/{id}')
    """
    plural = path_name(cls)
    name = cls.local_name
    tags = (name,)
    collection_route = f"/{plural}"
    item_route = f"{collection_route}/{{id}}"

    collection = PathItem(
        route=collection_route,
        description=cls.comment,
        operations={
            "get": OperationSpec(
                method="get",
                operation_id=f"{plural}_get",
                summary=f"List all instances of {name}",
                description=f"Gets a list of all instances of {name}",
                parameters=_page_parameters(),
                response_ref=name,
                response_arity=ResponseArity.ARRAY,
                success_status=200,
                error_statuses=(400, 502),
                tags=tags,
            ),
            "post": OperationSpec(
                method="post",
                operation_id=f"{plural}_post",
                summary=f"Create one {name}",
                description=f"Create a new instance of {name}",
                request_body_ref=name,
                response_ref=name,
                response_arity=ResponseArity.SINGLE,
                success_status=201,
                error_statuses=(400, 401, 502),
                tags=tags,
            ),
        },
    )

    item = PathItem(
        route=item_route,
        description=cls.comment,
        operations={
            "get": OperationSpec(
                method="get",
                operation_id=f"{plural}_id_get",
                summary=f"Get a single {name} by its id",
                description=f"Gets the details of a given {name}",
                parameters=(_id_parameter(name),),
                response_ref=name,
                response_arity=ResponseArity.SINGLE,
                success_status=200,
                error_statuses=(400, 404, 502),
                tags=tags,
            ),
            "put": OperationSpec(
                method="put",
                operation_id=f"{plural}_id_put",
                summary=f"Update an existing {name}",
                description=f"Replaces the properties of an existing {name}",
                parameters=(_id_parameter(name),),
                request_body_ref=name,
                response_ref=name,
                response_arity=ResponseArity.SINGLE,
                success_status=200,
                error_statuses=(400, 401, 404, 502),
                tags=tags,
            ),
            "delete": OperationSpec(
                method="delete",
                operation_id=f"{plural}_id_delete",
                summary=f"Delete an existing {name}",
                description=f"Deletes an existing {name}; resources referencing it are left untouched",
                parameters=(_id_parameter(name),),
                response_arity=ResponseArity.NONE,
                success_status=204,
                error_statuses=(400, 401, 404, 502),
                tags=tags,
            ),
        },
    )
    return collection, item


def compile_spec(model: OntologyModel, config: Optional[CompilerConfig] = None) -> ApiSpecDocument:
    """
    Compile an ontology model into an OpenAPI document.

    Args:
        model: Ontology model
        config: Compiler options

    Returns:
        ApiSpecDocument with schemas and paths for the selected classes

    Raises:
        UnknownFilterClassError: If the filter names unknown classes
        PathCollisionError: If two classes pluralize to the same route
    """
    config = config or CompilerConfig()
    included = select_classes(model, config.filter, config.include_undomained)

    schemas: Dict[str, SchemaObject] = {}
    paths: Dict[str, PathItem] = {}
    route_owner: Dict[str, str] = {}

    for class_iri in sorted(included):
        cls = model.get_class(class_iri)
        collection, item = build_paths(cls)
        owner = route_owner.get(collection.route)
        if owner is not None:
            raise PathCollisionError(collection.route, (owner, class_iri))
        route_owner[collection.route] = class_iri

        schemas[cls.local_name] = class_to_schema(model, class_iri, config.include_undomained)
        paths[collection.route] = collection
        paths[item.route] = item

    document = ApiSpecDocument(
        title=config.title,
        version=config.version,
        description=_document_description(model),
        server_url=config.server_url,
        openapi_version=OPENAPI_VERSION,
        schemas=dict(sorted(schemas.items())),
        paths=dict(sorted(paths.items())),
    )

    dangling = document.dangling_refs()
    if dangling:
        raise SpecCompileError(f"Unresolved schema references: {', '.join(dangling)}")

    log_info(
        message="Specification compiled",
        extra={"classes": len(included), "routes": len(paths)}
    )
    return document


def custom_path_item(endpoint: CustomEndpoint, schema_name: str) -> PathItem:
    """
    Path item documenting a custom query route.

    Placeholders become query parameters of the same name.

    Examples:
        >>> custom_path_item(endpoint, "Region").operations["get"].operation_id
        'regions_part_of_europe_get'
    """
    parameters = []
    for name, spec in sorted(endpoint.parameters.items()):
        parameters.append(
            ParameterSpec(
                name=name,
                location="query",
                required=spec.required,
                schema={"type": "integer" if spec.type is PlaceholderType.INTEGER else "string"},
                description="Resource id or IRI" if spec.type is PlaceholderType.IRI else None,
            )
        )

    operation_id = endpoint.route.strip("/").replace("/", "_").replace("-", "_").replace(".", "_") + "_get"
    summary = endpoint.template.summary or f"Custom query {endpoint.route}"
    return PathItem(
        route=endpoint.route,
        operations={
            "get": OperationSpec(
                method="get",
                operation_id=operation_id,
                summary=summary,
                parameters=tuple(parameters),
                response_ref=schema_name,
                response_arity=ResponseArity.ARRAY,
                success_status=200,
                error_statuses=(400, 502),
                tags=(schema_name,),
            )
        },
    )


def _document_description(model: OntologyModel) -> Optional[str]:
    if not model.ontology_iris:
        return None
    return "API generated from " + ", ".join(model.ontology_iris)


def serialize_spec(document: ApiSpecDocument) -> str:
    """
    Serialize a document as OpenAPI 3.0 YAML with sorted keys.

    Equal documents always serialize to identical text.
    """
    return yaml.safe_dump(
        document.to_openapi(),
        sort_keys=True,
        default_flow_style=False,
        allow_unicode=True,
        width=4096,
    )


def parse_spec(text: str) -> ApiSpecDocument:
    """Read a serialized specification back into an ApiSpecDocument."""
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise SpecCompileError("Specification is not a YAML mapping")
    return ApiSpecDocument.from_openapi(data)
