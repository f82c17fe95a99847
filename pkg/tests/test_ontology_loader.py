"""
Tests for ontology loading and model extraction.
"""

import pytest

from services.ontology_loader import (
    OntologyLoadError,
    OntologySource,
    OntologySyntax,
    UnknownClassError,
    effective_properties,
    load_ontology,
    superclass_closure,
    syntax_for,
)
from tests.conftest import EX, FIXTURES, PART_OF_REGION, REGION
from utils.logger import get_logs

PEOPLE = "https://w3id.org/people#"


@pytest.fixture
def people_model():
    return load_ontology([FIXTURES / "people.ttl"])


class TestRegionOntology:
    """Single class ontology in Turtle and RDF/XML."""

    def test_classes_and_properties(self, region_model):
        assert [c.iri for c in region_model.sorted_classes()] == [REGION]
        region = region_model.get_class(REGION)
        assert region.local_name == "Region"
        assert region.comment == "A region refers to an extensive, continuous part of a surface or body."

        prop = region_model.get_property(PART_OF_REGION)
        assert prop.is_object
        assert prop.domains == frozenset({REGION})
        assert prop.ranges == frozenset({REGION})
        assert prop.comment == "Region where the region is included in."

    def test_ontology_iri_recorded(self, region_model):
        assert region_model.ontology_iris == ("https://w3id.org/example",)

    def test_rdf_xml_matches_turtle(self, region_model):
        xml_model = load_ontology([FIXTURES / "region.owl"])
        assert xml_model.classes == region_model.classes
        assert xml_model.properties == region_model.properties

    def test_explicit_syntax_overrides_extension(self, region_model):
        model = load_ontology([OntologySource(str(FIXTURES / "region.owl"), OntologySyntax.RDF_XML)])
        assert model.classes == region_model.classes

    def test_load_is_logged(self, region_model):
        entry = [e for e in get_logs() if e["message"] == "Ontology loaded"][-1]
        assert entry["extra"]["classes"] == 1
        assert entry["extra"]["properties"] == 1


class TestClassExtraction:

    def test_reserved_namespace_skipped(self, people_model):
        names = sorted(c.local_name for c in people_model.classes)
        assert names == ["Cat", "Entity", "Person", "Student"]

    def test_out_of_scope_superclass_dropped(self, people_model):
        student = people_model.class_by_local_name("Student")
        assert student.direct_superclasses == frozenset({PEOPLE + "Person"})

    def test_restriction_superclass_ignored(self, people_model):
        assert people_model.class_by_local_name("Cat").direct_superclasses == frozenset()

    def test_missing_comment_is_none(self, people_model):
        assert people_model.class_by_local_name("Cat").comment is None

    def test_superclass_closure(self, people_model):
        closure = superclass_closure(people_model, PEOPLE + "Student")
        assert closure == frozenset({PEOPLE + "Person", PEOPLE + "Entity"})

    def test_closure_of_unknown_class(self, people_model):
        with pytest.raises(UnknownClassError) as exc_info:
            superclass_closure(people_model, EX + "Nowhere")
        assert exc_info.value.iri == EX + "Nowhere"


class TestPropertyExtraction:

    def test_union_domain_expanded(self, people_model):
        name = people_model.get_property(PEOPLE + "name")
        assert name.domains == frozenset({PEOPLE + "Person", PEOPLE + "Cat"})

    def test_intersection_domain_ignored_with_warning(self, people_model):
        age = people_model.get_property(PEOPLE + "age")
        assert age.domains == frozenset()
        warnings = [e for e in get_logs() if e["level"] == "WARNING"]
        assert any("intersection" in e["message"] and e["extra"]["property"] == PEOPLE + "age" for e in warnings)

    def test_functional_flag(self, people_model):
        assert people_model.get_property(PEOPLE + "identifier").functional
        assert not people_model.get_property(PEOPLE + "name").functional

    def test_inherited_properties(self, people_model):
        names = {p.local_name for p in effective_properties(people_model, PEOPLE + "Student")}
        assert names == {"identifier", "name", "enrolledSince", "knows"}

    def test_undomained_properties_opt_in(self, people_model):
        without = {p.local_name for p in effective_properties(people_model, PEOPLE + "Cat")}
        with_all = {p.local_name for p in effective_properties(people_model, PEOPLE + "Cat", include_undomained=True)}
        assert without == {"name", "owner"}
        assert with_all == {"name", "owner", "nickname", "age"}


class TestLoadErrors:

    def test_syntax_error_reports_line(self):
        with pytest.raises(OntologyLoadError) as exc_info:
            load_ontology([FIXTURES / "broken.ttl"])
        error = exc_info.value
        assert error.document.endswith("broken.ttl")
        assert error.line is not None
        assert "line" in str(error)

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "absent.ttl"
        with pytest.raises(OntologyLoadError) as exc_info:
            load_ontology([missing])
        assert str(missing) in str(exc_info.value)

    def test_unsupported_extension(self, tmp_path):
        odd = tmp_path / "ontology.json"
        odd.write_text("{}")
        with pytest.raises(OntologyLoadError, match="unsupported extension"):
            load_ontology([odd])

    @pytest.mark.parametrize("location,expected", [
        ("a.ttl", OntologySyntax.TURTLE),
        ("a.OWL", OntologySyntax.RDF_XML),
        ("https://example.org/onto.rdf?v=2", OntologySyntax.RDF_XML),
        ("a.n3", None),
    ])
    def test_syntax_for(self, location, expected):
        assert syntax_for(location) is expected
