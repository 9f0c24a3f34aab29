"""Purpose extraction from the canonical example, matching, and selection."""

from pathlib import Path

import pytest

from execdesc import ns
from execdesc.description import extract
from execdesc.purpose import (
    ByClaim,
    ByDocument,
    ByFigure,
    ByLabel,
    EvidenceFor,
    GeneratesFigure,
    InlineClaim,
    Label,
    RemoteClaim,
    SupportsClaim,
    analyze_purposes,
    extract_purposes,
    matches,
    select_processes,
    strip_fragment,
)
from execdesc.rdf import Iri, load_rdf_xml, parse_rdf_xml

FIXTURE = Path(__file__).parent / "data" / "canonical-description.rdf"
DOI = Iri("https://doi.org/10.1234/123456789")
CLAIM = Iri("https://example.com/article24#claim31")
BASE = "http://example.com/project/description.rdf"

RDF_DECL = 'xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"'


def doc(body: str, extra: str = "") -> str:
    return f'<rdf:RDF {RDF_DECL} {extra}>{body}</rdf:RDF>'


@pytest.fixture(scope="module")
def fixture_graph():
    return load_rdf_xml(FIXTURE)


@pytest.fixture(scope="module")
def fixture_description(fixture_graph):
    return extract(fixture_graph)


def fixture_iri(graph, name: str) -> Iri:
    base = str(graph.base)
    if name.startswith("#"):
        return Iri(base + name)
    return Iri(base.rsplit("/", 1)[0] + "/" + name)


class TestCanonicalPurposes:
    def expect(self, graph, name):
        return extract_purposes(graph, fixture_iri(graph, name))

    def test_plain_labels(self, fixture_graph):
        assert self.expect(fixture_graph, "#make") == [Label("compiles libraries", "en")]
        assert self.expect(fixture_graph, "#make-data") == [Label("makes data", "en")]
        assert self.expect(fixture_graph, "#plot-figures") == [Label("plot figures", "en")]

    def test_evidence_link(self, fixture_graph):
        assert self.expect(fixture_graph, "links-to-pub") == [EvidenceFor(DOI)]

    def test_figure_link(self, fixture_graph):
        assert self.expect(fixture_graph, "links-to-fig") == [
            GeneratesFigure("Figure 2b", DOI)
        ]

    def test_claim_support_both_forms(self, fixture_graph):
        inline = InlineClaim(
            Iri("https://www.wikidata.org/entity/Q12156"),
            Iri("http://www.wikidata.org/prop/P1060"),
            Iri("https://www.wikidata.org/entity/Q15304532"),
        )
        assert self.expect(fixture_graph, "defines-nanopub") == [
            SupportsClaim(inline),
            SupportsClaim(RemoteClaim(CLAIM)),
        ]

    def test_process_without_purposes(self, fixture_graph):
        assert self.expect(fixture_graph, "#example-of-parameters") == []


class TestAlternativeShapes:
    def test_figure_via_property_chain(self):
        g = parse_rdf_xml(
            doc(
                '<process rdf:about="#p"><purpose><rdf:Description>'
                '<prov:generated><rdf:Description>'
                '<doco:figure><rdf:Description><dc:title>F1</dc:title></rdf:Description></doco:figure>'
                "</rdf:Description></prov:generated>"
                "</rdf:Description></purpose></process>",
                extra=f'xmlns:prov="{ns.PROV}" xmlns:doco="{ns.DOCO}" xmlns:dc="{ns.DC}"',
            ),
            BASE,
        )
        assert extract_purposes(g, Iri(BASE + "#p")) == [GeneratesFigure("F1", None)]

    def test_typed_generation_without_figure_details(self):
        g = parse_rdf_xml(
            doc(
                '<process rdf:about="#p"><purpose><prov:generated/></purpose></process>',
                extra=f'xmlns:prov="{ns.PROV}"',
            ),
            BASE,
        )
        assert extract_purposes(g, Iri(BASE + "#p")) == [GeneratesFigure(None, None)]

    def test_claim_via_supports_property_to_statement(self):
        g = parse_rdf_xml(
            doc(
                '<process rdf:about="#p"><purpose><rdf:Description>'
                '<cito:supports><wikibase:Statement>'
                '<subject rdf:resource="http://x/s"/><predicate rdf:resource="http://x/p"/><object rdf:resource="http://x/o"/>'
                "</wikibase:Statement></cito:supports>"
                "</rdf:Description></purpose></process>",
                extra=f'xmlns:cito="{ns.CITO}" xmlns:wikibase="{ns.WIKIBASE}"',
            ),
            BASE,
        )
        assert extract_purposes(g, Iri(BASE + "#p")) == [
            SupportsClaim(InlineClaim(Iri("http://x/s"), Iri("http://x/p"), Iri("http://x/o")))
        ]

    def test_unrecognized_shape_degrades_to_flagged_label(self):
        g = parse_rdf_xml(
            doc('<process rdf:about="#p"><purpose><rdf:Description><command>odd</command></rdf:Description></purpose></process>'),
            BASE,
        )
        purposes, unrecognized = analyze_purposes(g, Iri(BASE + "#p"))
        assert len(purposes) == 1 and isinstance(purposes[0], Label)
        assert len(unrecognized) == 1
        assert purposes[0].text == unrecognized[0]

    def test_purpose_bearing_process_never_comes_back_empty(self):
        g = parse_rdf_xml(
            doc('<process rdf:about="#p"><purpose rdf:resource="http://nothing.example/here"/></process>'),
            BASE,
        )
        assert extract_purposes(g, Iri(BASE + "#p")) != []


class TestMatching:
    def test_document_query_against_each_variant(self):
        q = ByDocument(DOI)
        assert matches(EvidenceFor(DOI), q)
        assert matches(GeneratesFigure("Figure 2b", DOI), q)
        assert not matches(EvidenceFor(Iri("https://doi.org/10.9999/other")), q)
        assert not matches(Label("compiles libraries"), q)

    def test_remote_claim_matches_its_page(self):
        p = SupportsClaim(RemoteClaim(CLAIM))
        assert matches(p, ByDocument(Iri("https://example.com/article24")))
        assert not matches(p, ByDocument(Iri("https://example.com/article25")))

    def test_no_resolver_normalization(self):
        assert not matches(
            EvidenceFor(DOI), ByDocument(Iri("http://doi.org/10.1234/123456789"))
        )

    def test_label_modes(self):
        p = Label("Compiles Libraries")
        assert matches(p, ByLabel("Compiles Libraries", "exact"))
        assert not matches(p, ByLabel("compiles libraries", "exact"))
        assert matches(p, ByLabel("COMPILES", "substring"))
        assert matches(p, ByLabel("les lib", "substring"))
        assert not matches(p, ByLabel("figures", "substring"))

    def test_bad_label_mode_rejected(self):
        with pytest.raises(ValueError):
            ByLabel("x", "fuzzy")

    def test_figure_query_title_is_case_sensitive(self):
        p = GeneratesFigure("Figure 2b", DOI)
        assert matches(p, ByFigure(DOI))
        assert matches(p, ByFigure(DOI, "Figure 2b"))
        assert not matches(p, ByFigure(DOI, "Figure 2B"))
        assert not matches(p, ByFigure(Iri("https://doi.org/other"), "Figure 2b"))

    def test_claim_query_keeps_fragments(self):
        target = RemoteClaim(CLAIM)
        assert matches(SupportsClaim(target), ByClaim(target))
        assert not matches(
            SupportsClaim(target), ByClaim(RemoteClaim(Iri("https://example.com/article24")))
        )

    def test_inline_claim_query(self):
        inline = InlineClaim(Iri("http://x/s"), Iri("http://x/p"), Iri("http://x/o"))
        assert matches(SupportsClaim(inline), ByClaim(inline))
        other = InlineClaim(Iri("http://x/s"), Iri("http://x/p"), Iri("http://x/other"))
        assert not matches(SupportsClaim(inline), ByClaim(other))

    def test_strip_fragment(self):
        assert strip_fragment(CLAIM) == "https://example.com/article24"
        assert strip_fragment(Iri("http://x/plain")) == "http://x/plain"


class TestSelection:
    def test_document_query_on_canonical_example(self, fixture_graph, fixture_description):
        got = select_processes(fixture_description, ByDocument(DOI))
        assert got == [
            fixture_iri(fixture_graph, "links-to-fig"),
            fixture_iri(fixture_graph, "links-to-pub"),
        ]

    def test_label_query(self, fixture_graph, fixture_description):
        got = select_processes(fixture_description, ByLabel("compiles libraries"))
        assert got == [fixture_iri(fixture_graph, "#make")]

    def test_claim_query(self, fixture_graph, fixture_description):
        got = select_processes(fixture_description, ByClaim(RemoteClaim(CLAIM)))
        assert got == [fixture_iri(fixture_graph, "defines-nanopub")]

    def test_empty_description(self):
        d = extract(parse_rdf_xml(doc(""), BASE))
        assert select_processes(d, ByLabel("anything")) == []

    def test_agrees_with_brute_force_scan(self, fixture_description):
        queries = [
            ByDocument(DOI),
            ByLabel("compiles libraries"),
            ByLabel("makes", "substring"),
            ByFigure(DOI, "Figure 2b"),
            ByClaim(RemoteClaim(CLAIM)),
            ByDocument(Iri("https://example.com/article24")),
        ]
        for q in queries:
            brute = sorted(
                iri
                for iri, desc in fixture_description.processes.items()
                if any(matches(p, q) for p in desc.purposes)
            )
            got = select_processes(fixture_description, q)
            assert got == brute
            assert got == sorted(set(got))
            assert set(got) <= set(fixture_description.processes)
