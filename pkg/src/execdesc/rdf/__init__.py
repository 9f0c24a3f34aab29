"""Minimal RDF data model plus RDF/XML reading and writing."""

from execdesc.rdf.model import (
    BlankNode,
    Graph,
    GraphBuilder,
    Iri,
    Literal,
    ParseWarning,
    Subject,
    Term,
    Triple,
    graph_from_triples,
    is_absolute_iri,
    n3,
    resolve_reference,
    triple_key,
)
from execdesc.rdf.reader import (
    RdfParseError,
    UnsupportedConstructError,
    load_rdf_xml,
    parse_rdf_xml,
)
from execdesc.rdf.writer import SerializeError, dump_rdf_xml, serialize_rdf_xml

__all__ = [
    "BlankNode",
    "Graph",
    "GraphBuilder",
    "Iri",
    "Literal",
    "ParseWarning",
    "RdfParseError",
    "SerializeError",
    "Subject",
    "Term",
    "Triple",
    "UnsupportedConstructError",
    "dump_rdf_xml",
    "graph_from_triples",
    "is_absolute_iri",
    "load_rdf_xml",
    "n3",
    "parse_rdf_xml",
    "resolve_reference",
    "serialize_rdf_xml",
    "triple_key",
]
