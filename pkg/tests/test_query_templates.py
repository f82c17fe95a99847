"""
Tests for SPARQL template generation, decorators and instantiation.
"""

import pytest
from rdflib.plugins.sparql import prepareQuery
from rdflib.plugins.sparql.parser import parseUpdate

from models.ontology import ClassInfo
from models.query import PlaceholderBinding, PlaceholderType, QueryKind, detect_query_form
from services.query_templates import (
    SELECTED_MARKER,
    CustomQueryError,
    DecoratorParseError,
    MissingBindingError,
    TemplateError,
    UnsafeValueError,
    generate_default_templates,
    instantiate,
    load_custom_queries,
    normalize_route,
    parse_decorators,
    register_custom_query,
    render_template_file,
    template_from_file,
)
from tests.conftest import FIXTURES, INSTANCE_PREFIX, REGION

TEXAS = INSTANCE_PREFIX + "Texas"
GRAPH = "https://w3id.org/example/graphs/public"

PART_OF = """#+ summary: Regions in a region
PREFIX ex: <https://w3id.org/example#>
CONSTRUCT { ?item ?p ?o } WHERE { ?item ex:partOfRegion ?_parent_iri . ?item ?p ?o }
"""


@pytest.fixture
def templates():
    generated = generate_default_templates(ClassInfo.from_iri(REGION), "regions")
    return {t.kind: t for t in generated}


class TestDefaultTemplates:

    def test_five_kinds(self, templates):
        assert list(templates) == [
            QueryKind.GET_ALL, QueryKind.GET_BY_ID, QueryKind.INSERT, QueryKind.UPDATE, QueryKind.DELETE,
        ]
        assert templates[QueryKind.GET_BY_ID].name == "regions/get_by_id"

    def test_placeholders(self, templates):
        def names(kind):
            return {p.name for p in templates[kind].placeholders}

        assert names(QueryKind.GET_ALL) == {"per_page_int", "offset_int", "label"}
        assert names(QueryKind.GET_BY_ID) == {"resource_iri"}
        assert names(QueryKind.INSERT) == {"graph_iri", "triples_nt"}
        assert names(QueryKind.UPDATE) == {"graph_iri", "resource_iri", "triples_nt"}
        assert names(QueryKind.DELETE) == {"graph_iri", "resource_iri"}
        assert not templates[QueryKind.GET_ALL].placeholder("label").required

    def test_get_all_is_class_scoped(self, templates):
        text = templates[QueryKind.GET_ALL].text
        assert f"<{REGION}>" in text
        assert SELECTED_MARKER in text

    def test_read_templates_parse(self, templates):
        query = instantiate(templates[QueryKind.GET_ALL], {"per_page_int": 10, "offset_int": 0, "label": "Eu"})
        prepareQuery(query)
        prepareQuery(instantiate(templates[QueryKind.GET_BY_ID], {"resource_iri": TEXAS}))

    def test_update_templates_parse(self, templates):
        triples = f"<{TEXAS}> <http://www.w3.org/2000/01/rdf-schema#label> \"Texas\" ."
        parseUpdate(instantiate(templates[QueryKind.INSERT], {"graph_iri": GRAPH, "triples_nt": triples}))
        parseUpdate(instantiate(
            templates[QueryKind.UPDATE],
            {"graph_iri": GRAPH, "resource_iri": TEXAS, "triples_nt": triples},
        ))
        parseUpdate(instantiate(templates[QueryKind.DELETE], {"graph_iri": GRAPH, "resource_iri": TEXAS}))

    def test_file_round_trip(self, templates):
        original = templates[QueryKind.GET_ALL]
        text = render_template_file(original)
        assert text.startswith("#+ summary: List all instances of Region")
        reloaded = template_from_file(original.name, original.kind, text, REGION)
        assert reloaded.text == original.text
        assert reloaded.placeholders == original.placeholders
        assert reloaded.summary == original.summary


class TestQueryForm:

    def test_hash_inside_prefix_iri(self):
        text = (
            "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
            "CONSTRUCT { ?s a <urn:x> } WHERE { ?s rdfs:label ?o }"
        )
        assert detect_query_form(text) == "CONSTRUCT"

    def test_comments_skipped(self):
        text = "# header\nPREFIX ex: <https://w3id.org/example#> # trailing\n  # indented\nSELECT * WHERE { ?s ?p ?o }"
        assert detect_query_form(text) == "SELECT"

    def test_updates(self):
        assert detect_query_form("PREFIX ex: <https://w3id.org/example#>\nINSERT DATA { <urn:a> ex:b <urn:c> }") == "UPDATE"
        assert detect_query_form("DELETE { ?s ?p ?o } WHERE { ?s ?p ?o }") == "UPDATE"

    def test_hash_namespace_class(self):
        region = ClassInfo.from_iri("https://w3id.org/ex#Region")
        get_all = generate_default_templates(region, "regions")[0]
        assert get_all.kind is QueryKind.GET_ALL
        assert detect_query_form(get_all.text) == "CONSTRUCT"


class TestInstantiate:

    def test_iri_substitution(self, templates):
        query = instantiate(templates[QueryKind.GET_BY_ID], [PlaceholderBinding("resource_iri", TEXAS)])
        assert f"<{TEXAS}> ?predicate ?prop" in query
        assert "?_resource_iri" not in query

    @pytest.mark.parametrize("value", [
        "x> . } ; DROP ALL",
        "https://w3id.org/x> . } ; DROP ALL",
        "https://w3id.org/a b",
        "",
    ])
    def test_injection_guard(self, templates, value):
        with pytest.raises(UnsafeValueError) as exc_info:
            instantiate(templates[QueryKind.GET_BY_ID], {"resource_iri": value})
        assert exc_info.value.name == "resource_iri"

    def test_literal_escaping(self, templates):
        query = instantiate(
            templates[QueryKind.GET_ALL],
            {"per_page_int": 5, "offset_int": 0, "label": 'Eu") } ; DROP ALL ; ?x'},
        )
        assert '"Eu\\") } ; DROP ALL ; \\u003Fx"' in query
        prepareQuery(query)

    def test_optional_label_defaults_to_empty(self, templates):
        query = instantiate(templates[QueryKind.GET_ALL], {"per_page_int": 5, "offset_int": 0})
        assert 'FILTER("" = ""' in query

    def test_missing_required(self, templates):
        with pytest.raises(MissingBindingError) as exc_info:
            instantiate(templates[QueryKind.GET_ALL], {"offset_int": 0})
        assert exc_info.value.name == "per_page_int"

    def test_integer_type_checked(self, templates):
        with pytest.raises(TemplateError):
            instantiate(templates[QueryKind.GET_ALL], {"per_page_int": "10", "offset_int": 0})

    def test_unknown_binding(self, templates):
        with pytest.raises(TemplateError, match="no placeholder"):
            instantiate(templates[QueryKind.GET_BY_ID], {"resource_iri": TEXAS, "region": "x"})


class TestDecorators:

    def test_summary_and_placeholders(self):
        parsed = parse_decorators(PART_OF)
        assert parsed.summary == "Regions in a region"
        assert [(p.name, p.type) for p in parsed.placeholders] == [("parent_iri", PlaceholderType.IRI)]
        assert parsed.body.startswith("PREFIX ex:")

    def test_typed_placeholders(self):
        parsed = parse_decorators(
            "CONSTRUCT { ?r ?p ?o } WHERE { ?r ?p ?o ; <https://w3id.org/x#within> ?_region_iri ; "
            "<https://w3id.org/x#population> ?pop FILTER(?pop > ?_minpop_int && STR(?r) != ?__name) }"
        )
        specs = {p.name: p for p in parsed.placeholders}
        assert specs["region_iri"].type is PlaceholderType.IRI
        assert specs["minpop_int"].type is PlaceholderType.INTEGER
        assert specs["name"].type is PlaceholderType.LITERAL
        assert not specs["name"].required

    def test_malformed_line_reports_position(self):
        with pytest.raises(DecoratorParseError) as exc_info:
            parse_decorators("#+ summary: ok\n#+ not a pair\nCONSTRUCT {} WHERE {}")
        assert exc_info.value.line == 2

    def test_optional_iri_rejected(self):
        with pytest.raises(TemplateError):
            parse_decorators("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?__thing_iri }")


class TestCustomQueries:

    def test_register(self, region_artifacts):
        endpoint = register_custom_query(
            "regions/part-of", PART_OF, region_artifacts.table, region_artifacts.context,
        )
        assert endpoint.route == "/regions/part-of"
        assert endpoint.class_iri == REGION
        assert endpoint.required_parameters() == ("parent_iri",)
        assert endpoint.template.kind is QueryKind.CUSTOM

    def test_route_collision(self, region_artifacts):
        with pytest.raises(CustomQueryError, match="already served"):
            register_custom_query(
                "/regions", PART_OF, region_artifacts.table, region_artifacts.context, ["/regions"],
            )

    def test_select_rejected(self, region_artifacts):
        with pytest.raises(CustomQueryError, match="CONSTRUCT"):
            register_custom_query(
                "/regions/all", "SELECT ?s WHERE { ?s ?p ?o }", region_artifacts.table, region_artifacts.context,
            )

    def test_unknown_class(self, region_artifacts):
        with pytest.raises(CustomQueryError, match="no 'class' decorator"):
            register_custom_query("/planets/big", PART_OF, region_artifacts.table, region_artifacts.context)

    def test_class_decorator_must_be_served(self, region_artifacts):
        with pytest.raises(CustomQueryError, match="not part of the API"):
            register_custom_query(
                "/regions/odd", "#+ class: Planet\n" + PART_OF, region_artifacts.table, region_artifacts.context,
            )

    def test_load_directory(self, region_artifacts):
        endpoints = load_custom_queries(
            FIXTURES / "custom", region_artifacts.table, region_artifacts.context, region_artifacts.document.paths,
        )
        assert [e.route for e in endpoints] == ["/regions/part-of"]
        assert endpoints[0].template.summary == "Regions included in a given region"

    @pytest.mark.parametrize("route", ["", "/regions//x", "/regions/a b"])
    def test_invalid_routes(self, route):
        with pytest.raises(CustomQueryError):
            normalize_route(route)
