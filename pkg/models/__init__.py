"""
Data models for ontogate.

This package provides core data models including:
- Ontology model (classes, properties)
- OpenAPI document model
- SPARQL query templates and custom endpoints
- Resources, JSON-LD context and path/class table
- Caller identity and conformance reports
"""

from .ontology import ClassInfo, PropertyInfo, PropertyKind, OntologyModel
from .api_spec import ApiSpecDocument, SchemaObject, PropertySchema, PathItem, OperationSpec
from .query import QueryKind, QueryTemplate, PlaceholderSpec, PlaceholderType, CustomEndpoint
from .resource import ContextMap, ContextTerm, PathClassTable, ResourceEnvelope
from .identity import UserIdentity
from .report import CheckStatus, ConformanceReport, RouteResult

__all__ = [
    "ClassInfo",
    "PropertyInfo",
    "PropertyKind",
    "OntologyModel",
    "ApiSpecDocument",
    "SchemaObject",
    "PropertySchema",
    "PathItem",
    "OperationSpec",
    "QueryKind",
    "QueryTemplate",
    "PlaceholderSpec",
    "PlaceholderType",
    "CustomEndpoint",
    "ContextMap",
    "ContextTerm",
    "PathClassTable",
    "ResourceEnvelope",
    "UserIdentity",
    "CheckStatus",
    "ConformanceReport",
    "RouteResult",
]

__version__ = "1.0.0"
