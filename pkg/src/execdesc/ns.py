"""Namespace IRIs and vocabulary terms used by execution descriptions.

Term IRIs are formed by direct concatenation of namespace and local name,
which is how RDF/XML element names expand.  Several of the borrowed
namespaces end without a separator character; the concatenated forms below
are intentional.
"""

from execdesc.rdf.model import Iri

ED = "http://example.org/execution-description/1.0"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
DC = "http://purl.org/dc/elements/1.1/"
WIKIBASE = "http://wikiba.se/ontology#"
CITO = "http://purl.org/spar/cito"
DOCO = "http://purl.org/spar/doco/2015-07-03"
PROV = "http://www.w3.org/TR/2013/PR-prov-o-20130312/"
WFDESC = "http://purl.org/wf4ever/wfdesc#"
XML = "http://www.w3.org/XML/1998/namespace"

RDF_TYPE = Iri(RDF + "type")

ED_PROCESS = Iri(ED + "process")
ED_COMMAND = Iri(ED + "command")
ED_PURPOSE = Iri(ED + "purpose")
ED_DEPENDS_ON = Iri(ED + "dependsOn")
ED_SUBJECT = Iri(ED + "subject")
ED_PREDICATE = Iri(ED + "predicate")
ED_OBJECT = Iri(ED + "object")
ED_MIN_VALUE = Iri(ED + "minValue")
ED_MAX_VALUE = Iri(ED + "maxValue")
ED_ALLOWED_VALUE = Iri(ED + "allowedValue")

RDFS_LABEL = Iri(RDFS + "label")
DC_TITLE = Iri(DC + "title")
DC_IS_PART_OF = Iri(DC + "isPartOf")
WIKIBASE_STATEMENT = Iri(WIKIBASE + "Statement")
CITO_SUPPORTS = Iri(CITO + "supports")
CITO_CITED_AS_EVIDENCE_BY = Iri(CITO + "isCitedAsEvidenceBy")
DOCO_FIGURE = Iri(DOCO + "figure")
PROV_GENERATED = Iri(PROV + "generated")
WFDESC_PARAMETER = Iri(WFDESC + "Parameter")

# Prefixes used when serializing graphs that did not retain their own
# declarations.  The empty prefix is the document default namespace.
WELL_KNOWN_PREFIXES: dict[str, str] = {
    "": ED,
    "rdf": RDF,
    "rdfs": RDFS,
    "dc": DC,
    "wikibase": WIKIBASE,
    "cito": CITO,
    "doco": DOCO,
    "prov": PROV,
    "wfdesc": WFDESC,
}
