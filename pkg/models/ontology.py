"""
Ontology model extracted from RDF documents.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from utils.naming import local_name


class PropertyKind(Enum):
    """Property kind enumeration."""
    OBJECT = "object"
    DATATYPE = "datatype"


@dataclass(frozen=True)
class ClassInfo:
    """
    A named ontology class.

    Attributes:
        iri: Class IRI
        local_name: IRI fragment or last path segment
        comment: rdfs:comment chosen for documentation
        direct_superclasses: In-scope named superclasses
    """

    iri: str
    local_name: str
    comment: Optional[str] = None
    direct_superclasses: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if not self.local_name:
            raise ValueError(f"Class has no local name: {self.iri}")
        if self.local_name != local_name(self.iri):
            raise ValueError(
                f"Local name {self.local_name!r} does not derive from {self.iri}"
            )

    @classmethod
    def from_iri(
        cls,
        iri: str,
        comment: Optional[str] = None,
        direct_superclasses: FrozenSet[str] = frozenset()
    ) -> "ClassInfo":
        """Build a ClassInfo deriving the local name from the IRI."""
        return cls(
            iri=iri,
            local_name=local_name(iri),
            comment=comment,
            direct_superclasses=frozenset(direct_superclasses),
        )


@dataclass(frozen=True)
class PropertyInfo:
    """
    An object or datatype property.

    Attributes:
        iri: Property IRI
        local_name: IRI fragment or last path segment
        kind: Object or datatype property
        comment: rdfs:comment chosen for documentation
        domains: Named domain classes, unions expanded
        ranges: Named range classes (object) or datatypes (datatype)
        functional: Declared owl:FunctionalProperty
    """

    iri: str
    local_name: str
    kind: PropertyKind
    comment: Optional[str] = None
    domains: FrozenSet[str] = frozenset()
    ranges: FrozenSet[str] = frozenset()
    functional: bool = False

    @property
    def is_object(self) -> bool:
        return self.kind is PropertyKind.OBJECT


@dataclass(frozen=True)
class OntologyModel:
    """
    Normalized class/property model of one or more ontology documents.

    The model is immutable; lookup indexes are built once at construction.
    """

    prefixes: Mapping[str, str] = field(default_factory=dict)
    classes: FrozenSet[ClassInfo] = frozenset()
    properties: FrozenSet[PropertyInfo] = frozenset()
    ontology_iris: Tuple[str, ...] = ()
    _classes_by_iri: Dict[str, ClassInfo] = field(init=False, repr=False, compare=False)
    _classes_by_name: Dict[str, ClassInfo] = field(init=False, repr=False, compare=False)
    _properties_by_iri: Dict[str, PropertyInfo] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_name: Dict[str, ClassInfo] = {}
        for info in sorted(self.classes, key=lambda c: c.iri):
            other = by_name.get(info.local_name)
            if other is not None:
                raise ValueError(
                    f"Classes {other.iri} and {info.iri} share the local name {info.local_name!r}"
                )
            by_name[info.local_name] = info
        object.__setattr__(self, "_classes_by_iri", {c.iri: c for c in self.classes})
        object.__setattr__(self, "_classes_by_name", by_name)
        object.__setattr__(self, "_properties_by_iri", {p.iri: p for p in self.properties})

    def has_class(self, iri: str) -> bool:
        return iri in self._classes_by_iri

    def get_class(self, iri: str) -> Optional[ClassInfo]:
        """Return the class with the given IRI, or None."""
        return self._classes_by_iri.get(iri)

    def class_by_local_name(self, name: str) -> Optional[ClassInfo]:
        """Return the class with the given local name, or None."""
        return self._classes_by_name.get(name)

    def get_property(self, iri: str) -> Optional[PropertyInfo]:
        """Return the property with the given IRI, or None."""
        return self._properties_by_iri.get(iri)

    def sorted_classes(self) -> Tuple[ClassInfo, ...]:
        """Classes in IRI order."""
        return tuple(sorted(self.classes, key=lambda c: c.iri))
