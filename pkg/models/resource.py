"""
Resource and JSON-LD context models.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Union

from rdflib.namespace import RDFS

ID_KEYWORD = "id"
TYPE_KEYWORD = "type"
LABEL_KEYWORD = "label"
DEFAULT_FIELDS = (ID_KEYWORD, LABEL_KEYWORD, TYPE_KEYWORD)

SET_CONTAINER = "@set"
ID_TYPE = "@id"


class TermKind(Enum):
    """What a context term denotes."""
    CLASS = "class"
    OBJECT = "object"
    DATATYPE = "datatype"
    LABEL = "label"


@dataclass(frozen=True)
class ContextTerm:
    """
    One JSON-LD context entry.

    Attributes:
        name: JSON key
        iri: Expanded IRI
        kind: Class, object property, datatype property or label
        datatype: Literal datatype IRI (datatype properties with a range)
    """

    name: str
    iri: str
    kind: TermKind
    datatype: Optional[str] = None

    @property
    def container(self) -> Optional[str]:
        return SET_CONTAINER if self.kind in (TermKind.OBJECT, TermKind.LABEL) else None

    @property
    def type_hint(self) -> Optional[str]:
        if self.kind in (TermKind.CLASS, TermKind.OBJECT):
            return ID_TYPE
        return self.datatype

    def to_jsonld(self) -> Dict[str, str]:
        rendered = {"@id": self.iri}
        if self.type_hint:
            rendered["@type"] = self.type_hint
        if self.container:
            rendered["@container"] = self.container
        return rendered

    @classmethod
    def from_jsonld(cls, name: str, data: Union[str, Mapping[str, str]]) -> "ContextTerm":
        if isinstance(data, str):
            return cls(name=name, iri=data, kind=TermKind.DATATYPE)
        iri = data["@id"]
        type_hint = data.get("@type")
        container = data.get("@container")
        if name == LABEL_KEYWORD and iri == str(RDFS.label):
            kind = TermKind.LABEL
        elif type_hint == ID_TYPE:
            kind = TermKind.OBJECT if container == SET_CONTAINER else TermKind.CLASS
        else:
            kind = TermKind.DATATYPE
        return cls(
            name=name,
            iri=iri,
            kind=kind,
            datatype=type_hint if kind is TermKind.DATATYPE else None,
        )


LABEL_TERM = ContextTerm(name=LABEL_KEYWORD, iri=str(RDFS.label), kind=TermKind.LABEL)


@dataclass(frozen=True)
class ContextMap:
    """
    JSON-LD context: JSON keys to IRIs.

    ``id`` and ``type`` alias the JSON-LD keywords; ``label`` maps onto
    rdfs:label as a set.
    """

    terms: Dict[str, ContextTerm] = field(default_factory=dict)
    _by_iri: Dict[str, ContextTerm] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if LABEL_KEYWORD not in self.terms:
            terms = {LABEL_KEYWORD: LABEL_TERM}
            terms.update(self.terms)
            object.__setattr__(self, "terms", terms)
        object.__setattr__(
            self, "_by_iri", {t.iri: t for t in self.terms.values() if t.kind is not TermKind.CLASS}
        )

    def term(self, name: str) -> Optional[ContextTerm]:
        return self.terms.get(name)

    def property_term_for_iri(self, iri: str) -> Optional[ContextTerm]:
        """Property (or label) term whose IRI is the given predicate."""
        return self._by_iri.get(iri)

    def class_iri(self, name: str) -> Optional[str]:
        """IRI of the class term with the given local name."""
        term = self.terms.get(name)
        return term.iri if term is not None and term.kind is TermKind.CLASS else None

    def class_name(self, iri: str) -> Optional[str]:
        return next((t.name for t in self.terms.values() if t.kind is TermKind.CLASS and t.iri == iri), None)

    def to_jsonld(self) -> Dict[str, Any]:
        """Render as a standalone JSON-LD context document."""
        context: Dict[str, Any] = {ID_KEYWORD: "@id", TYPE_KEYWORD: "@type"}
        for name, term in sorted(self.terms.items()):
            context[name] = term.to_jsonld()
        return {"@context": context}

    @classmethod
    def from_jsonld(cls, document: Mapping[str, Any]) -> "ContextMap":
        context = document.get("@context", document)
        return cls(
            terms={
                name: ContextTerm.from_jsonld(name, value)
                for name, value in context.items()
                if name not in (ID_KEYWORD, TYPE_KEYWORD) and not name.startswith("@")
            }
        )


@dataclass(frozen=True)
class PathClassTable:
    """
    Bijection between API path segments and class IRIs.

    Examples:
        >>> table = PathClassTable({"regions": "https://w3id.org/example#Region"})
        >>> table.segment_for("https://w3id.org/example#Region")
        'regions'
    """

    entries: Dict[str, str] = field(default_factory=dict)
    _by_class: Dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_class: Dict[str, str] = {}
        for segment, class_iri in self.entries.items():
            if class_iri in by_class:
                raise ValueError(f"Class {class_iri} mapped by both /{by_class[class_iri]} and /{segment}")
            by_class[class_iri] = segment
        object.__setattr__(self, "_by_class", by_class)

    def class_for(self, segment: str) -> Optional[str]:
        return self.entries.get(segment)

    def segment_for(self, class_iri: str) -> Optional[str]:
        return self._by_class.get(class_iri)

    def to_text(self) -> str:
        """Two tab-separated columns, one class per line, sorted by segment."""
        return "".join(f"{segment}\t{iri}\n" for segment, iri in sorted(self.entries.items()))

    @classmethod
    def from_text(cls, text: str) -> "PathClassTable":
        entries: Dict[str, str] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"paths.map line {number}: expected '<segment>\\t<class IRI>'")
            if parts[0] in entries:
                raise ValueError(f"paths.map line {number}: duplicate segment {parts[0]}")
            entries[parts[0]] = parts[1].strip()
        return cls(entries)


Scalar = Union[str, int, float, bool]


class ResourceEnvelope:
    """
    Plain JSON resource served by the API.

    Attributes:
        id: Instance-prefix-relative id or absolute IRI (None on POST input)
        label: Labels without language tags
        type: Class local names
        properties: Field name to list of nested envelopes or scalars
    """

    def __init__(
        self,
        id: Optional[str] = None,
        label: Optional[List[str]] = None,
        type: Optional[List[str]] = None,
        properties: Optional[Dict[str, List[Union["ResourceEnvelope", Scalar]]]] = None
    ):
        self.id = id
        self.label = list(label or [])
        self.type = list(type or [])
        self.properties = dict(properties or {})

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert to the JSON shape of the schema (id, properties, label, type).

        Returns:
            Envelope as dictionary
        """
        data: Dict[str, Any] = {}
        if self.id is not None:
            data[ID_KEYWORD] = self.id
        for name in sorted(self.properties):
            data[name] = [
                value.to_dict() if isinstance(value, ResourceEnvelope) else value
                for value in self.properties[name]
            ]
        data[LABEL_KEYWORD] = list(self.label)
        data[TYPE_KEYWORD] = list(self.type)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ResourceEnvelope":
        """
        Create an envelope from schema-valid JSON.

        Nested objects become envelopes; null fields are treated as empty.
        """
        properties: Dict[str, List[Union[ResourceEnvelope, Scalar]]] = {}
        for name, values in data.items():
            if name in DEFAULT_FIELDS or values is None:
                continue
            properties[name] = [
                cls.from_dict(value) if isinstance(value, Mapping) else value
                for value in values
            ]
        return cls(
            id=data.get(ID_KEYWORD),
            label=data.get(LABEL_KEYWORD) or [],
            type=data.get(TYPE_KEYWORD) or [],
            properties=properties,
        )

    def __repr__(self) -> str:
        return f"ResourceEnvelope(id={self.id!r}, type={self.type!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResourceEnvelope):
            return False
        return self.to_dict() == other.to_dict()
