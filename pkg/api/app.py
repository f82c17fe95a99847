"""
FastAPI application factory.

Mounts the routes of a compiled artifact set:
- GET/POST on every collection route, GET/PUT/DELETE on every item route
- custom CONSTRUCT query routes (registered before item routes)
- GET /openapi.yaml serving the specification text
"""

import time
import uuid
from contextlib import asynccontextmanager
from typing import Any, Callable, Dict, List, Optional

import httpx
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from config.gateway import ConfigError, GatewayConfig
from models.query import CustomEndpoint
from services.artifacts import ArtifactSet, load_artifacts
from services.auth import Authenticator, TokenValidator
from services.query_templates import load_custom_queries
from services.resource_service import BadRequestError, GatewayError, ResourceService
from services.spec_compiler import custom_path_item, serialize_spec
from services.sparql_client import SparqlClient
from utils.logger import log_error, log_info, log_request
from utils.triplestore import EmbeddedStore

EMBEDDED_QUERY_URL = "http://embedded.ontogate/sparql"
SPEC_ROUTE = "/openapi.yaml"
REQUEST_ID_HEADER = "X-Request-ID"

Handler = Callable[[Request], Any]


def build_embedded_store(config: GatewayConfig) -> EmbeddedStore:
    """
    Embedded store seeded with the configured files, in the default graph.

    Raises:
        ConfigError: If a seed file cannot be read or parsed
    """
    store = EmbeddedStore()
    for seed in config.endpoint.seed:
        try:
            store.load(seed, config.default_graph)
        except Exception as e:  # rdflib parsers raise many exception types
            raise ConfigError(["endpoint.seed"], f"cannot load {seed}: {e}")
    return store


def create_app(
    config: GatewayConfig,
    artifacts: Optional[ArtifactSet] = None,
    transport: Optional[httpx.AsyncBaseTransport] = None,
    token_validator: Optional[TokenValidator] = None
) -> FastAPI:
    """
    Build the gateway application.

    Args:
        config: Gateway configuration
        artifacts: Artifact set (default: loaded from config.artifacts)
        transport: httpx transport to the SPARQL endpoint; defaults to the
            embedded store when the endpoint is ``memory:``
        token_validator: Custom bearer token validator

    Returns:
        FastAPI application; ``app.state`` exposes service, store and spec

    Raises:
        ArtifactError: If the artifacts are missing or inconsistent
        CustomQueryError: If a custom query cannot be mounted
    """
    if artifacts is None:
        artifacts = load_artifacts(config.artifacts)

    store: Optional[EmbeddedStore] = None
    query_url, update_url = config.endpoint.query, config.endpoint.update_url
    if config.endpoint.is_embedded:
        query_url = update_url = EMBEDDED_QUERY_URL
        if transport is None:
            store = build_embedded_store(config)
            transport = store.transport()

    client = SparqlClient(query_url, update_url, transport=transport)
    service = ResourceService(artifacts, client, config)
    authenticator = Authenticator(config, token_validator)

    custom: List[CustomEndpoint] = []
    if config.custom_queries:
        custom = load_custom_queries(
            config.custom_queries, artifacts.table, artifacts.context, artifacts.document.paths
        )

    document = artifacts.document
    spec_text = artifacts.spec_text
    for endpoint in custom:
        document = document.with_path(
            custom_path_item(endpoint, artifacts.context.class_name(endpoint.class_iri))
        )
    if custom:
        spec_text = serialize_spec(document)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        log_info(message="Gateway started", extra={"routes": len(document.paths)})
        yield
        await client.close()
        log_info(message="Gateway stopped")

    app = FastAPI(
        title=document.title,
        version=document.version,
        openapi_url=None,
        docs_url=None,
        redoc_url=None,
        lifespan=lifespan,
    )
    app.state.config = config
    app.state.artifacts = artifacts
    app.state.document = document
    app.state.spec_text = spec_text
    app.state.service = service
    app.state.client = client
    app.state.store = store

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        request_id = request.headers.get(REQUEST_ID_HEADER) or str(uuid.uuid4())
        started = time.perf_counter()
        response = await call_next(request)
        response.headers[REQUEST_ID_HEADER] = request_id
        log_request(
            method=request.method,
            path=request.url.path,
            status=response.status_code,
            duration_seconds=time.perf_counter() - started,
            request_id=request_id,
        )
        return response

    @app.exception_handler(GatewayError)
    async def gateway_error_handler(request: Request, exc: GatewayError):
        headers = {"WWW-Authenticate": "Bearer"} if exc.status == 401 else None
        if exc.status >= 500:
            log_error(
                error_message=exc.message,
                error_type=type(exc).__name__,
                extra={"method": request.method, "path": request.url.path},
            )
        return JSONResponse(status_code=exc.status, content=exc.to_dict(), headers=headers)

    @app.get(SPEC_ROUTE, include_in_schema=False)
    async def get_spec():
        return PlainTextResponse(spec_text, media_type="application/yaml")

    for endpoint in custom:
        app.add_api_route(endpoint.route, _custom_handler(service, authenticator, endpoint), methods=["GET"])

    for route, item in artifacts.document.paths.items():
        segment = route.strip("/").split("/")[0]
        if item.is_item_route:
            handlers = _item_handlers(service, authenticator, segment)
            mount = f"/{segment}/{{id:path}}"
        else:
            handlers = _collection_handlers(service, authenticator, segment)
            mount = f"/{segment}"
        for method in sorted(item.operations):
            handler = handlers.get(method)
            if handler is not None:
                app.add_api_route(mount, handler, methods=[method.upper()], include_in_schema=False)

    return app


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except ValueError:
        raise BadRequestError("Request body is not valid JSON")


def _collection_handlers(service: ResourceService, authenticator: Authenticator, segment: str) -> Dict[str, Handler]:
    async def list_resources(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        params = request.query_params
        resources = await service.get_all(
            segment,
            user,
            label=params.get("label"),
            page=params.get("page"),
            per_page=params.get("per_page"),
        )
        return JSONResponse(resources)

    async def create_resource(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        created = await service.create(segment, await _json_body(request), user)
        return JSONResponse(created, status_code=201)

    return {"get": list_resources, "post": create_resource}


def _item_handlers(service: ResourceService, authenticator: Authenticator, segment: str) -> Dict[str, Handler]:
    async def get_resource(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        return JSONResponse(await service.get_by_id(segment, request.path_params["id"], user))

    async def replace_resource(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        body = await _json_body(request)
        return JSONResponse(await service.replace(segment, request.path_params["id"], body, user))

    async def delete_resource(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        await service.delete(segment, request.path_params["id"], user)
        return Response(status_code=204)

    return {"get": get_resource, "put": replace_resource, "delete": delete_resource}


def _custom_handler(service: ResourceService, authenticator: Authenticator, endpoint: CustomEndpoint) -> Handler:
    async def run_custom_query(request: Request):
        user = authenticator.authenticate(request.headers.get("authorization"), request.method)
        return JSONResponse(await service.run_custom(endpoint, request.query_params, user))

    return run_custom_query
