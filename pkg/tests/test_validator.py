"""
Tests for input validation utilities.
"""

import pytest

from utils.validator import escape_literal, to_json_schema, validate_instance, validate_iri


@pytest.fixture
def components(region_artifacts):
    return region_artifacts.document.to_openapi()["components"]["schemas"]


class TestValidateIri:

    @pytest.mark.parametrize("value", [
        "https://w3id.org/example/instance/Texas",
        "urn:uuid:7c9e6679-7425-40de-944b-e07fc1f90ae7",
        "http://dbpedia.org/resource/Caf%C3%A9",
    ])
    def test_valid(self, value):
        assert validate_iri(value) == (True, None)

    @pytest.mark.parametrize("value,reason", [
        ("", "empty"),
        ("Texas", "absolute"),
        ("https://w3id.org/x> . } ; DROP ALL", "forbidden"),
        ("https://w3id.org/a\nb", "forbidden"),
        ('https://w3id.org/"quoted"', "forbidden"),
    ])
    def test_rejected(self, value, reason):
        ok, message = validate_iri(value)
        assert not ok
        assert reason in message


def test_escape_literal():
    assert escape_literal('say "hi"\n') == 'say \\"hi\\"\\n'
    assert escape_literal("back\\slash") == "back\\\\slash"
    assert escape_literal("?var") == "\\u003Fvar"


class TestJsonSchema:

    def test_nullable_becomes_type_list(self):
        converted = to_json_schema({"type": "array", "items": {"type": "string"}, "nullable": True})
        assert converted == {"type": ["array", "null"], "items": {"type": "string"}}

    def test_objects_are_closed(self):
        converted = to_json_schema({"type": "object", "properties": {"id": {"type": "string"}}})
        assert converted["additionalProperties"] is False

    def test_shallow_references(self):
        converted = to_json_schema({"type": "array", "items": {"$ref": "#/components/schemas/Region"}}, shallow=True)
        assert converted["items"] == {"type": "object"}


class TestValidateInstance:

    def test_valid_region(self, components):
        region = {
            "id": "Texas",
            "partOfRegion": [{"id": "USA", "label": ["USA"], "type": ["Region"]}],
            "label": ["Texas"],
            "type": ["Region"],
        }
        assert validate_instance(region, "Region", components) == (True, None, None)

    def test_nulls_allowed(self, components):
        ok, _, _ = validate_instance({"id": "Texas", "partOfRegion": None, "label": None}, "Region", components)
        assert ok

    def test_unknown_field(self, components):
        ok, message, field = validate_instance({"id": "Texas", "population": [1]}, "Region", components)
        assert not ok
        assert field == "population"
        assert "population" in message

    def test_nested_error_path(self, components):
        region = {"label": ["Marina del Rey"], "partOfRegion": [{"label": "Los Angeles"}]}
        ok, _, field = validate_instance(region, "Region", components)
        assert not ok
        assert field == "partOfRegion/0/label"

    def test_shallow_skips_nested(self, components):
        region = {"label": ["Marina del Rey"], "partOfRegion": [{"label": "Los Angeles"}]}
        ok, _, _ = validate_instance(region, "Region", components, shallow=True)
        assert ok

    def test_array_response(self, components):
        ok, _, field = validate_instance([{"id": "Texas"}, {"id": 7}], "Region", components, as_array=True)
        assert not ok
        assert field == "1/id"

    def test_unknown_schema(self, components):
        ok, message, _ = validate_instance({}, "Planet", components)
        assert not ok
        assert "Planet" in message
