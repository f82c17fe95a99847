"""
SPARQL query template model.

Templates are SPARQL texts with placeholder variables: ``?_name`` is
required, ``?__name`` is optional. The placeholder type follows the name
suffix (``_iri``, ``_int``, ``_nt``, anything else is a literal).
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple, Union

PLACEHOLDER_PATTERN = re.compile(r"(?<![\w?])\?(__?)(\w+)")

_COMMENT = re.compile(r"(?:^|(?<=\s))#[^\n]*", re.MULTILINE)
_PROLOGUE = re.compile(r"^\s*(PREFIX\s+\S*\s*<[^>]*>|BASE\s+<[^>]*>)\s*", re.IGNORECASE)
_FORM = re.compile(r"^\s*(CONSTRUCT|SELECT|ASK|DESCRIBE)\b", re.IGNORECASE)


class QueryKind(Enum):
    """Template kind enumeration."""
    GET_ALL = "get-all"
    GET_BY_ID = "get-by-id"
    INSERT = "insert"
    UPDATE = "update"
    DELETE = "delete"
    CUSTOM = "custom"

    @property
    def is_read(self) -> bool:
        return self in (QueryKind.GET_ALL, QueryKind.GET_BY_ID, QueryKind.CUSTOM)

    @property
    def file_name(self) -> str:
        """Template file name used in the artifact directory."""
        return self.value.replace("-", "_") + ".rq"


class PlaceholderType(Enum):
    """Placeholder value type enumeration."""
    IRI = "iri"
    LITERAL = "literal"
    INTEGER = "integer"
    TRIPLES = "triples"


def placeholder_type_for(name: str) -> PlaceholderType:
    """
    Derive the placeholder type from its name suffix.

    Examples:
        >>> placeholder_type_for("region_iri")
        <PlaceholderType.IRI: 'iri'>
        >>> placeholder_type_for("minpop_int")
        <PlaceholderType.INTEGER: 'integer'>
        >>> placeholder_type_for("label")
        <PlaceholderType.LITERAL: 'literal'>
    """
    if name.endswith("_iri"):
        return PlaceholderType.IRI
    if name.endswith("_int"):
        return PlaceholderType.INTEGER
    if name.endswith("_nt"):
        return PlaceholderType.TRIPLES
    return PlaceholderType.LITERAL


def detect_query_form(text: str) -> str:
    """
    Return the query form keyword (CONSTRUCT, SELECT, ASK, DESCRIBE) or UPDATE.

    Comments and the PREFIX/BASE prologue are skipped.
    """
    body = _COMMENT.sub("", text)
    while True:
        match = _PROLOGUE.match(body)
        if not match:
            break
        body = body[match.end():]
    form = _FORM.match(body)
    return form.group(1).upper() if form else "UPDATE"


@dataclass(frozen=True)
class PlaceholderSpec:
    """
    A typed placeholder of a template.

    Attributes:
        name: Placeholder name without the leading ``?_`` / ``?__``
        type: Value type
        required: False for ``?__name`` placeholders
    """

    name: str
    type: PlaceholderType
    required: bool = True

    @property
    def token(self) -> str:
        """Placeholder as written in the query text."""
        return ("?_" if self.required else "?__") + self.name

    @classmethod
    def from_token(cls, underscores: str, name: str) -> "PlaceholderSpec":
        return cls(name=name, type=placeholder_type_for(name), required=underscores == "_")


BindingValue = Union[str, int]


@dataclass(frozen=True)
class PlaceholderBinding:
    """A value bound to a placeholder at request time."""

    name: str
    value: BindingValue


@dataclass(frozen=True)
class QueryTemplate:
    """
    A parametrized SPARQL operation.

    Attributes:
        name: Template name (e.g. regions/get_by_id)
        kind: Template kind
        text: Query body with placeholders
        placeholders: Placeholders found in the body
        summary: ``#+ summary`` decorator
        metadata: All decorators
        class_iri: Class the template serves
    """

    name: str
    kind: QueryKind
    text: str
    placeholders: Tuple[PlaceholderSpec, ...] = ()
    summary: Optional[str] = None
    metadata: Mapping[str, object] = field(default_factory=dict)
    class_iri: Optional[str] = None

    def __post_init__(self):
        found = {m.group(2) for m in PLACEHOLDER_PATTERN.finditer(self.text)}
        declared = {p.name for p in self.placeholders}
        if found != declared:
            raise ValueError(
                f"Template {self.name}: placeholders {sorted(declared)} do not match query text {sorted(found)}"
            )
        if self.kind.is_read and self.form != "CONSTRUCT":
            raise ValueError(f"Template {self.name}: {self.kind.value} must be a CONSTRUCT query")

    @property
    def form(self) -> str:
        return detect_query_form(self.text)

    def placeholder(self, name: str) -> Optional[PlaceholderSpec]:
        """Return the placeholder with the given name, or None."""
        return next((p for p in self.placeholders if p.name == name), None)


@dataclass(frozen=True)
class CustomEndpoint:
    """
    A mounted custom query route.

    Attributes:
        route: API route (e.g. /regions/part-of-europe)
        template: The CONSTRUCT template backing it
        class_iri: Class whose schema shapes the response
        parameters: Query parameter name to placeholder
    """

    route: str
    template: QueryTemplate
    class_iri: str
    parameters: Dict[str, PlaceholderSpec] = field(default_factory=dict)

    def required_parameters(self) -> Tuple[str, ...]:
        return tuple(sorted(name for name, spec in self.parameters.items() if spec.required))
