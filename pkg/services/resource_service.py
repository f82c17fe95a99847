"""
Resource service.

Translates API requests into instantiated SPARQL templates against the
knowledge graph endpoint:
- paginated, label-filtered listing and single-resource reads
- recursive creation of nested resources (validated before any write)
- replacement and non-recursive deletion in the caller's named graph
- custom CONSTRUCT query routes
"""

import asyncio
import uuid
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from rdflib import Graph

from config.gateway import GatewayConfig, ReadScope
from config.settings import DEFAULT_PER_PAGE, MAX_PER_PAGE
from models.api_spec import SchemaObject, ValueShape
from models.identity import UserIdentity
from models.query import CustomEndpoint, PlaceholderType, QueryKind, QueryTemplate
from models.resource import ID_KEYWORD, TYPE_KEYWORD, ResourceEnvelope
from services.artifacts import ArtifactSet
from services.jsonld_bridge import EnvelopeValidationError, decode_id, envelope_to_triples, frame_results
from services.query_templates import BindingTypeError, TemplateError, UnsafeValueError, instantiate
from services.sparql_client import SparqlClient, SparqlError
from utils.logger import log_error, log_resource_change
from utils.validator import validate_instance, validate_iri


class GatewayError(Exception):
    """Base exception for request handling errors."""

    status = 500

    def __init__(self, message: str, field: Optional[str] = None):
        self.message = message
        self.field = field
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        body: Dict[str, Any] = {"detail": self.message}
        if self.field:
            body["field"] = self.field
        return body


class BadRequestError(GatewayError):
    """Exception for invalid parameters or bodies."""
    status = 400


class AuthenticationError(GatewayError):
    """Exception for missing or invalid credentials."""
    status = 401


class ResourceNotFoundError(GatewayError):
    """Exception for unknown routes or resources."""
    status = 404


class UpstreamError(GatewayError):
    """Exception for knowledge graph endpoint failures."""
    status = 502


@dataclass(frozen=True)
class PlannedWrite:
    """Triples of one resource, ready to be written."""

    iri: str
    class_iri: str
    triples: Graph


def _join(*parts: Union[str, int, None]) -> str:
    return "/".join(str(p) for p in parts if p not in (None, ""))


def resolve_read_scope(user: UserIdentity, config: GatewayConfig) -> Optional[str]:
    """
    Graph a read request is restricted to.

    Returns:
        None for all-graphs (union of every graph), the user's graph for
        own-graph (the default graph for anonymous callers)
    """
    if config.read_scope is ReadScope.OWN_GRAPH:
        return user.graph
    return None


def parse_page_parameter(name: str, value: Optional[Union[str, int]], default: int, maximum: Optional[int]) -> int:
    """
    Parse a pagination parameter.

    Raises:
        BadRequestError: If the value is not an integer in range
    """
    if value is None or value == "":
        return default
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise BadRequestError(f"{name} must be an integer", field=name)
    if number < 1 or (maximum is not None and number > maximum):
        bounds = f"between 1 and {maximum}" if maximum is not None else "at least 1"
        raise BadRequestError(f"{name} must be {bounds}", field=name)
    return number


class ResourceService:
    """
    Request handlers of the gateway.

    Reads are freely concurrent. Writes to the same named graph are
    serialized by one asyncio.Lock per graph.
    """

    def __init__(self, artifacts: ArtifactSet, client: SparqlClient, config: GatewayConfig):
        """
        Initialize the service.

        Args:
            artifacts: Loaded artifact set
            client: Shared SPARQL client
            config: Gateway configuration
        """
        self.artifacts = artifacts
        self.client = client
        self.config = config
        self._components = {
            name: schema.to_openapi() for name, schema in artifacts.document.schemas.items()
        }
        self._graph_locks: Dict[str, asyncio.Lock] = {}

    def graph_lock(self, graph: str) -> asyncio.Lock:
        """Exclusive section of one named graph."""
        lock = self._graph_locks.get(graph)
        if lock is None:
            lock = self._graph_locks[graph] = asyncio.Lock()
        return lock

    # Route resolution

    def _route_class(self, segment: str) -> Tuple[str, SchemaObject]:
        class_iri = self.artifacts.table.class_for(segment)
        if class_iri is None:
            raise ResourceNotFoundError(f"Unknown route /{segment}")
        return class_iri, self._schema_for(class_iri)

    def _schema_for(self, class_iri: str) -> SchemaObject:
        name = self.artifacts.context.class_name(class_iri)
        schema = self.artifacts.document.schemas.get(name) if name else None
        if schema is None:
            raise ResourceNotFoundError(f"No schema for class {class_iri}")
        return schema

    def _template(self, class_iri: str, kind: QueryKind) -> QueryTemplate:
        segment = self.artifacts.table.segment_for(class_iri)
        template = self.artifacts.template(segment, kind) if segment else None
        if template is None:
            raise ResourceNotFoundError(f"No {kind.value} operation for class {class_iri}")
        return template

    def _resource_iri(self, resource_id: str, field: str = ID_KEYWORD) -> str:
        iri = decode_id(resource_id, self.config.instance_prefix)
        ok, reason = validate_iri(iri)
        if not ok:
            raise BadRequestError(f"Invalid id {resource_id!r}: {reason}", field=field)
        return iri

    def _render(self, template: QueryTemplate, bindings: Mapping[str, Any]) -> str:
        try:
            return instantiate(template, bindings)
        except (UnsafeValueError, BindingTypeError) as e:
            raise BadRequestError(str(e), field=getattr(e, "name", None))
        except TemplateError as e:
            raise BadRequestError(str(e))

    # SPARQL access

    async def _construct(self, query: str, graph: Optional[str], kind: QueryKind, route: str) -> Graph:
        try:
            return await self.client.construct(query, default_graph=graph, kind=kind.value, route=route)
        except SparqlError as e:
            raise UpstreamError(str(e))

    async def _update(self, update: str, kind: QueryKind, route: str):
        try:
            await self.client.update(update, kind=kind.value, route=route)
        except SparqlError as e:
            log_error(error_message="Write failed", error_type=type(e).__name__, extra={"route": route})
            raise UpstreamError(str(e))

    def _read_scope(self, user: UserIdentity) -> Optional[str]:
        return resolve_read_scope(user, self.config)

    # Reads

    async def get_all(
        self,
        segment: str,
        user: UserIdentity,
        label: Optional[str] = None,
        page: Optional[Union[str, int]] = None,
        per_page: Optional[Union[str, int]] = None
    ) -> List[Dict[str, Any]]:
        """
        List one page of the instances of a class.

        Args:
            segment: Collection path segment (e.g. regions)
            user: Caller
            label: Case-insensitive label substring filter
            page: Page number, from 1
            per_page: Page size, 1 to MAX_PER_PAGE

        Returns:
            Resource dictionaries ordered by IRI

        Raises:
            ResourceNotFoundError: Unknown route
            BadRequestError: Invalid pagination parameters
            UpstreamError: Endpoint failure
        """
        class_iri, schema = self._route_class(segment)
        page_number = parse_page_parameter("page", page, 1, None)
        page_size = parse_page_parameter("per_page", per_page, DEFAULT_PER_PAGE, MAX_PER_PAGE)

        query = self._render(
            self._template(class_iri, QueryKind.GET_ALL),
            {"per_page_int": page_size, "offset_int": (page_number - 1) * page_size, "label": label or None},
        )
        graph = await self._construct(query, self._read_scope(user), QueryKind.GET_ALL, f"/{segment}")
        envelopes = frame_results(
            graph, class_iri, None, self.artifacts.context, self.config.instance_prefix, schema.field_names()
        )
        return [envelope.to_dict() for envelope in envelopes]

    async def get_by_id(self, segment: str, resource_id: str, user: UserIdentity) -> Dict[str, Any]:
        """
        Read one resource.

        Raises:
            ResourceNotFoundError: Unknown route or no triples for the id
            BadRequestError: Malformed id
            UpstreamError: Endpoint failure
        """
        class_iri, _ = self._route_class(segment)
        envelope = await self._fetch(class_iri, self._resource_iri(resource_id), self._read_scope(user))
        if envelope is None:
            raise ResourceNotFoundError(f"Resource {resource_id} not found")
        return envelope.to_dict()

    async def _fetch(self, class_iri: str, iri: str, graph: Optional[str]) -> Optional[ResourceEnvelope]:
        schema = self._schema_for(class_iri)
        segment = self.artifacts.table.segment_for(class_iri)
        query = self._render(self._template(class_iri, QueryKind.GET_BY_ID), {"resource_iri": iri})
        result = await self._construct(query, graph, QueryKind.GET_BY_ID, f"/{segment}/{{id}}")
        envelopes = frame_results(
            result, class_iri, iri, self.artifacts.context, self.config.instance_prefix, schema.field_names()
        )
        return envelopes[0] if envelopes else None

    # Writes

    async def create(self, segment: str, body: Any, user: UserIdentity) -> Dict[str, Any]:
        """
        Create a resource and every id-less resource nested in it.

        The whole tree is validated and converted to triples before the
        first write. Nested resources are inserted before the resources
        referencing them; objects that already carry an id are only linked.

        Args:
            segment: Collection path segment
            body: Decoded JSON body
            user: Caller; resources go to its named graph

        Returns:
            The created root resource as read back from the graph

        Raises:
            BadRequestError: Validation failure anywhere in the tree
            UpstreamError: Endpoint failure
        """
        class_iri, schema = self._route_class(segment)
        if not isinstance(body, dict):
            raise BadRequestError("Request body must be a JSON object")

        plan: List[PlannedWrite] = []
        root_iri = self._plan(body, schema, class_iri, "", plan, mint_root=True)

        async with self.graph_lock(user.graph):
            for write in plan:
                await self._insert(write, user)

        created = await self._fetch(class_iri, root_iri, user.graph)
        if created is None:
            raise UpstreamError(f"Created resource {root_iri} cannot be read back")
        return created.to_dict()

    async def replace(self, segment: str, resource_id: str, body: Any, user: UserIdentity) -> Dict[str, Any]:
        """
        Replace the outgoing triples of a resource in the caller's graph.

        The id in the path is authoritative; a different id in the body is
        rejected. Nested id-less objects are created as in create().

        Raises:
            ResourceNotFoundError: Resource absent from the caller's graph
            BadRequestError: Validation failure or id mismatch
            UpstreamError: Endpoint failure
        """
        class_iri, schema = self._route_class(segment)
        iri = self._resource_iri(resource_id)
        if not isinstance(body, dict):
            raise BadRequestError("Request body must be a JSON object")

        body_id = body.get(ID_KEYWORD)
        if body_id is not None:
            if not isinstance(body_id, str) or decode_id(body_id, self.config.instance_prefix) != iri:
                raise BadRequestError("id in body does not match the path", field=ID_KEYWORD)

        plan: List[PlannedWrite] = []
        self._plan({**body, ID_KEYWORD: resource_id}, schema, class_iri, "", plan, mint_root=False)
        root = plan.pop()

        async with self.graph_lock(user.graph):
            if await self._fetch(class_iri, iri, user.graph) is None:
                raise ResourceNotFoundError(f"Resource {resource_id} not found")
            for write in plan:
                await self._insert(write, user)
            update = self._render(
                self._template(class_iri, QueryKind.UPDATE),
                {
                    "graph_iri": user.graph,
                    "resource_iri": iri,
                    "triples_nt": root.triples.serialize(format="nt"),
                },
            )
            await self._update(update, QueryKind.UPDATE, f"/{segment}/{{id}}")
            log_resource_change("update", iri, user.graph, username=user.username)

        updated = await self._fetch(class_iri, iri, user.graph)
        if updated is None:
            raise UpstreamError(f"Updated resource {iri} cannot be read back")
        return updated.to_dict()

    async def delete(self, segment: str, resource_id: str, user: UserIdentity):
        """
        Delete the outgoing triples of a resource from the caller's graph.

        References to the resource from other resources are left in place.

        Raises:
            ResourceNotFoundError: Resource absent from the caller's graph
            BadRequestError: Malformed id
            UpstreamError: Endpoint failure
        """
        class_iri, _ = self._route_class(segment)
        iri = self._resource_iri(resource_id)

        async with self.graph_lock(user.graph):
            if await self._fetch(class_iri, iri, user.graph) is None:
                raise ResourceNotFoundError(f"Resource {resource_id} not found")
            update = self._render(
                self._template(class_iri, QueryKind.DELETE),
                {"graph_iri": user.graph, "resource_iri": iri},
            )
            await self._update(update, QueryKind.DELETE, f"/{segment}/{{id}}")
            log_resource_change("delete", iri, user.graph, username=user.username)

    def _plan(
        self,
        data: Dict[str, Any],
        schema: SchemaObject,
        class_iri: str,
        path: str,
        plan: List[PlannedWrite],
        mint_root: bool
    ) -> str:
        """Validate one node, plan its id-less children first, then the node itself."""
        valid, message, field = validate_instance(data, schema.name, self._components, shallow=True)
        if not valid:
            raise BadRequestError(message or "Invalid resource", field=_join(path, field) or None)

        resolved = dict(data)
        for name, prop in schema.properties.items():
            if prop.value_shape is not ValueShape.ARRAY_OF_REF or not data.get(name):
                continue
            links = []
            for index, value in enumerate(data[name]):
                child_path = _join(path, name, index)
                child_id = value.get(ID_KEYWORD)
                if child_id is not None:
                    if not isinstance(child_id, str):
                        raise BadRequestError("id must be a string", field=_join(child_path, ID_KEYWORD))
                    links.append({ID_KEYWORD: child_id})
                    continue
                child_class, child_schema = self._nested_class(value, prop.ref_target, child_path)
                child_iri = self._plan(value, child_schema, child_class, child_path, plan, mint_root=True)
                links.append({ID_KEYWORD: child_iri})
            resolved[name] = links

        resource_id = data.get(ID_KEYWORD)
        if resource_id is None:
            if not mint_root:
                raise BadRequestError("Resource has no id", field=_join(path, ID_KEYWORD))
            resource_id = self.config.instance_prefix + str(uuid.uuid4())
        iri = self._resource_iri(resource_id, _join(path, ID_KEYWORD))

        try:
            triples = envelope_to_triples(
                ResourceEnvelope.from_dict({**resolved, ID_KEYWORD: iri}),
                class_iri,
                self.artifacts.context,
                self.config.instance_prefix,
                schema.field_names(),
            )
        except EnvelopeValidationError as e:
            raise BadRequestError(str(e), field=_join(path, e.field_path))

        plan.append(PlannedWrite(iri=iri, class_iri=class_iri, triples=triples))
        return iri

    def _nested_class(self, value: Dict[str, Any], range_name: Optional[str], path: str) -> Tuple[str, SchemaObject]:
        """Class of an id-less nested object: its first known ``type``, else the property range."""
        candidates = [t for t in value.get(TYPE_KEYWORD) or [] if isinstance(t, str)]
        if range_name:
            candidates.append(range_name)
        for name in candidates:
            class_iri = self.artifacts.context.class_iri(name)
            if class_iri is not None and name in self.artifacts.document.schemas:
                return class_iri, self.artifacts.document.schemas[name]
        raise BadRequestError("Cannot determine the class of the nested resource", field=_join(path, TYPE_KEYWORD))

    async def _insert(self, write: PlannedWrite, user: UserIdentity):
        segment = self.artifacts.table.segment_for(write.class_iri)
        update = self._render(
            self._template(write.class_iri, QueryKind.INSERT),
            {"graph_iri": user.graph, "triples_nt": write.triples.serialize(format="nt")},
        )
        await self._update(update, QueryKind.INSERT, f"/{segment}")
        log_resource_change("insert", write.iri, user.graph, username=user.username)

    # Custom queries

    async def run_custom(
        self,
        endpoint: CustomEndpoint,
        params: Mapping[str, str],
        user: UserIdentity
    ) -> List[Dict[str, Any]]:
        """
        Run a custom CONSTRUCT query and frame its results.

        Query parameters are bound to the placeholders of the same name;
        iri parameters accept an id or an absolute IRI.

        Raises:
            BadRequestError: Missing or ill-typed parameter
            UpstreamError: Endpoint failure
        """
        bindings: Dict[str, Any] = {}
        for name, spec in sorted(endpoint.parameters.items()):
            raw = params.get(name)
            if raw is None or raw == "":
                if spec.required:
                    raise BadRequestError(f"Missing query parameter {name}", field=name)
                continue
            if spec.type is PlaceholderType.INTEGER:
                try:
                    bindings[name] = int(raw)
                except ValueError:
                    raise BadRequestError(f"{name} must be an integer", field=name)
            elif spec.type is PlaceholderType.IRI:
                bindings[name] = self._resource_iri(raw, name)
            else:
                bindings[name] = raw

        query = self._render(endpoint.template, bindings)
        graph = await self._construct(query, self._read_scope(user), QueryKind.CUSTOM, endpoint.route)
        schema = self._schema_for(endpoint.class_iri)
        envelopes = frame_results(
            graph, endpoint.class_iri, None, self.artifacts.context, self.config.instance_prefix, schema.field_names()
        )
        return [envelope.to_dict() for envelope in envelopes]
