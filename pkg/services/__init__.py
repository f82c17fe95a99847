"""
Business logic services for ontogate.

This package provides core services including:
- Ontology loading and OpenAPI compilation
- SPARQL templates and the JSON-LD bridge
- The SPARQL client and the resource gateway
- Conformance checking
"""

from .ontology_loader import load_ontology, OntologyError
from .spec_compiler import compile_spec, CompilerConfig, SpecCompileError
from .query_templates import generate_default_templates, instantiate, TemplateError
from .jsonld_bridge import frame_results, envelope_to_triples, generate_context
from .artifacts import compile_artifacts, load_artifacts, write_artifacts, ArtifactError
from .sparql_client import SparqlClient, SparqlError
from .resource_service import ResourceService, GatewayError
from .auth import Authenticator
from .conformance import run_check

__all__ = [
    "load_ontology",
    "OntologyError",
    "compile_spec",
    "CompilerConfig",
    "SpecCompileError",
    "generate_default_templates",
    "instantiate",
    "TemplateError",
    "frame_results",
    "envelope_to_triples",
    "generate_context",
    "compile_artifacts",
    "load_artifacts",
    "write_artifacts",
    "ArtifactError",
    "SparqlClient",
    "SparqlError",
    "ResourceService",
    "GatewayError",
    "Authenticator",
    "run_check",
]

__version__ = "1.0.0"
