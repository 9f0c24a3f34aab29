"""Independent RDF/XML triple enumerator used only as a test oracle.

Deliberately shares no code with the package under test: DOM tree walking on
``xml.dom.minidom`` with hand-rolled namespace scoping, versus the package's
streaming SAX parser.  Triples come back as plain tuples:

    subject/object: ("iri", text) | ("bnode", label) | ("lit", lexical, lang, datatype)

Blank node labels are arbitrary ("o0", "o1", ...); compare graphs up to
blank-node bijection, not label by label.  Only valid documents are in scope;
malformed input may raise anything.
"""

from __future__ import annotations

from urllib.parse import urljoin, urlsplit
from xml.dom import minidom

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
ED_NS = "http://example.org/execution-description/1.0"


def _element_children(elem):
    return [c for c in elem.childNodes if c.nodeType == c.ELEMENT_NODE]


def _text_of(elem):
    return "".join(
        c.data
        for c in elem.childNodes
        if c.nodeType in (c.TEXT_NODE, c.CDATA_SECTION_NODE)
    )


def enumerate_rdfxml(data: bytes, base: str) -> frozenset:
    doc = minidom.parseString(data)
    root = doc.documentElement
    triples = set()
    named: dict[str, tuple] = {}
    counter = [0]

    def fresh():
        node = ("bnode", f"o{counter[0]}")
        counter[0] += 1
        return node

    def named_bnode(label):
        if label not in named:
            named[label] = fresh()
        return named[label]

    def resolve(ref):
        return ref if urlsplit(ref).scheme else urljoin(base, ref)

    def child_scope(elem, scope):
        scope = dict(scope)
        for name, value in (elem.attributes or {}).items():
            if name == "xmlns":
                scope[""] = value
            elif name.startswith("xmlns:"):
                scope[name[6:]] = value
            elif name == "xml:lang":
                scope["@lang"] = value or None
        return scope

    def expand(tag, scope):
        if ":" in tag:
            prefix, local = tag.split(":", 1)
            uri = scope[prefix]
        else:
            local = tag
            uri = scope.get("", ED_NS)
        return uri + local, uri, local

    def split_attrs(elem, scope):
        rdf_attrs = {}
        prop_attrs = []
        for name, value in (elem.attributes or {}).items():
            if name == "xmlns" or name.startswith("xmlns:") or name.startswith("xml:"):
                continue
            if ":" not in name:
                continue
            prefix, local = name.split(":", 1)
            uri = scope[prefix]
            if uri == RDF_NS:
                rdf_attrs[local] = value
            else:
                prop_attrs.append((uri + local, value))
        return rdf_attrs, prop_attrs

    def node_element(elem, scope):
        scope = child_scope(elem, scope)
        iri, uri, local = expand(elem.tagName, scope)
        rdf_attrs, prop_attrs = split_attrs(elem, scope)
        if "about" in rdf_attrs:
            subject = ("iri", resolve(rdf_attrs["about"]))
        elif "nodeID" in rdf_attrs:
            subject = named_bnode(rdf_attrs["nodeID"])
        else:
            subject = fresh()
        if not (uri == RDF_NS and local == "Description"):
            triples.add((subject, RDF_NS + "type", ("iri", iri)))
        lang = scope.get("@lang")
        for predicate, value in prop_attrs:
            triples.add((subject, predicate, ("lit", value, lang, None)))
        for child in _element_children(elem):
            property_element(child, scope, subject)
        return subject

    def property_element(elem, scope, subject):
        scope = child_scope(elem, scope)
        predicate, _, _ = expand(elem.tagName, scope)
        rdf_attrs, prop_attrs = split_attrs(elem, scope)
        lang = scope.get("@lang")

        if "resource" in rdf_attrs or "nodeID" in rdf_attrs:
            if "resource" in rdf_attrs:
                obj = ("iri", resolve(rdf_attrs["resource"]))
            else:
                obj = named_bnode(rdf_attrs["nodeID"])
            triples.add((subject, predicate, obj))
            for p, value in prop_attrs:
                triples.add((obj, p, ("lit", value, lang, None)))
            return

        children = _element_children(elem)
        if children:
            assert len(children) == 1
            obj = node_element(children[0], scope)
            triples.add((subject, predicate, obj))
            return

        if prop_attrs:
            obj = fresh()
            triples.add((subject, predicate, obj))
            for p, value in prop_attrs:
                triples.add((obj, p, ("lit", value, lang, None)))
            return

        datatype = rdf_attrs.get("datatype")
        if datatype is not None:
            datatype = resolve(datatype)
            obj = ("lit", _text_of(elem), None, datatype)
        else:
            obj = ("lit", _text_of(elem), lang, None)
        triples.add((subject, predicate, obj))

    scope = child_scope(root, {})
    iri, uri, local = expand(root.tagName, scope)
    assert uri == RDF_NS and local == "RDF", f"document element is {iri}"
    for child in _element_children(root):
        node_element(child, scope)
    return frozenset(triples)
