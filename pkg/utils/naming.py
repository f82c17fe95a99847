"""
Naming helpers shared by the compiler and the gateway.
"""

import re

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_VOWELS = frozenset("aeiou")


def local_name(iri: str) -> str:
    """
    Derive the local name of an IRI.

    The fragment after ``#`` wins; otherwise the last ``/`` segment.

    Args:
        iri: Absolute IRI

    Returns:
        Local name (may be empty for IRIs ending in a separator)

    Examples:
        >>> local_name("https://w3id.org/example#Region")
        'Region'
        >>> local_name("http://dbpedia.org/ontology/Band")
        'Band'
    """
    if "#" in iri:
        return iri.rsplit("#", 1)[1]
    return iri.rsplit("/", 1)[-1]


def pluralize(word: str) -> str:
    """
    Naive English pluralization used for API path segments.

    Examples:
        >>> pluralize("region")
        'regions'
        >>> pluralize("entity")
        'entities'
        >>> pluralize("person")
        'persons'
    """
    if len(word) > 1 and word.endswith("y") and word[-2] not in _VOWELS:
        return word[:-1] + "ies"
    if word.endswith(("s", "x", "z", "ch", "sh")):
        return word + "es"
    return word + "s"


def is_absolute_iri(value: str) -> bool:
    """Return True when value starts with a URI scheme."""
    return bool(_SCHEME.match(value))

