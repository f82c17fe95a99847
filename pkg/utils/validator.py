"""
Input validation utilities for ontogate.

Provides validation for:
- IRIs substituted into SPARQL (injection guard)
- Literal escaping for SPARQL strings
- JSON resources against the compiled OpenAPI schemas (via jsonschema)
"""

import re
from typing import Any, Dict, List, Mapping, Optional, Tuple

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError, best_match

from utils.naming import is_absolute_iri

# Characters that cannot appear inside a SPARQL IRIREF
_IRI_FORBIDDEN = re.compile(r'[<>"{}|^`\\\s\x00-\x20\x7f]')

_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "'": "\\'",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
    "?": "\\u003F",
}

_REF_PREFIX = "#/components/schemas/"


def validate_iri(value: str) -> Tuple[bool, Optional[str]]:
    """
    Check that a value can be written as ``<value>`` in a SPARQL query.

    Args:
        value: Candidate IRI

    Returns:
        Tuple of (is_valid, error_message)

    Examples:
        >>> validate_iri("https://w3id.org/example/resource/Texas")
        (True, None)
        >>> validate_iri("x> . } ; DROP ALL")
        (False, 'IRI must be absolute (scheme missing)')
    """
    if not value or not isinstance(value, str):
        return False, "IRI cannot be empty"

    if not is_absolute_iri(value):
        return False, "IRI must be absolute (scheme missing)"

    bad = _IRI_FORBIDDEN.search(value)
    if bad:
        return False, f"IRI contains forbidden character {bad.group(0)!r}"

    return True, None


def escape_literal(value: str) -> str:
    """
    Escape a string for use inside a double-quoted SPARQL literal.

    Question marks are written as ``\\u003F`` so substituted values never
    read as variables.
    """
    return "".join(_LITERAL_ESCAPES.get(char, char) for char in value)


def to_json_schema(oas_schema: Mapping[str, Any], shallow: bool = False) -> Dict[str, Any]:
    """
    Convert an OpenAPI 3.0 schema object into JSON Schema 2020-12.

    ``nullable`` becomes a ``null`` member of the type list, object schemas
    reject unknown fields. With ``shallow`` set, references to other
    schemas accept any object so nested resources can be checked against
    their own class separately.

    Args:
        oas_schema: OpenAPI schema object
        shallow: Replace schema references by plain objects

    Returns:
        JSON Schema dictionary
    """
    if "$ref" in oas_schema:
        return {"type": "object"} if shallow else {"$ref": oas_schema["$ref"]}

    converted: Dict[str, Any] = {}
    for key, value in oas_schema.items():
        if key == "nullable":
            continue
        if key == "properties":
            converted[key] = {name: to_json_schema(prop, shallow) for name, prop in value.items()}
        elif key == "items":
            converted[key] = to_json_schema(value, shallow)
        else:
            converted[key] = value

    if oas_schema.get("nullable") and "type" in converted:
        converted["type"] = [converted["type"], "null"]

    if oas_schema.get("type") == "object" and "properties" in oas_schema:
        converted["additionalProperties"] = False

    return converted


def build_validator(
    schema_name: str,
    components: Mapping[str, Mapping[str, Any]],
    shallow: bool = False,
    as_array: bool = False
) -> Draft202012Validator:
    """
    Build a validator for one component schema.

    Args:
        schema_name: Name under components/schemas
        components: All OpenAPI component schemas
        shallow: Do not follow references to other schemas
        as_array: Validate a JSON array of such resources

    Returns:
        Draft 2020-12 validator
    """
    ref: Dict[str, Any] = {"$ref": _REF_PREFIX + schema_name}
    root: Dict[str, Any] = {"type": "array", "items": ref} if as_array else dict(ref)
    root["components"] = {
        "schemas": {name: to_json_schema(schema, shallow) for name, schema in components.items()}
    }
    return Draft202012Validator(root)


def validate_instance(
    instance: Any,
    schema_name: str,
    components: Mapping[str, Mapping[str, Any]],
    shallow: bool = False,
    as_array: bool = False
) -> Tuple[bool, Optional[str], Optional[str]]:
    """
    Validate a JSON value against a component schema.

    Args:
        instance: Decoded JSON value
        schema_name: Name under components/schemas
        components: All OpenAPI component schemas
        shallow: Do not follow references to other schemas
        as_array: Validate a JSON array of such resources

    Returns:
        Tuple of (is_valid, error_message, field_path)

    Examples:
        >>> validate_instance({"bogus": 1}, "Region", components)
        (False, "Additional properties are not allowed ('bogus' was unexpected)", 'bogus')
    """
    if schema_name not in components:
        return False, f"Unknown schema {schema_name}", None

    validator = build_validator(schema_name, components, shallow, as_array)
    error = best_match(validator.iter_errors(instance))
    if error is None:
        return True, None, None
    return False, error.message, error_field_path(error)


def error_field_path(error: ValidationError) -> str:
    """
    Slash-separated path of the offending field.

    Unknown fields are appended to the path of their parent object.
    """
    parts: List[str] = [str(p) for p in error.absolute_path]
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        allowed = set((error.schema or {}).get("properties", {}))
        extras = sorted(k for k in error.instance if k not in allowed)
        if extras:
            parts.append(extras[0])
    return "/".join(parts)
