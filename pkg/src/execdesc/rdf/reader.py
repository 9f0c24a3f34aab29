"""Streaming parser for the RDF/XML subset used by execution descriptions.

The grammar alternates node elements and property elements, starting from an
``rdf:RDF`` document element.  Node elements name resources (typed elements add
an ``rdf:type`` triple; ``rdf:Description`` does not) and carry ``rdf:about``,
``rdf:nodeID``, or nothing (a fresh blank node).  Property elements carry the
object as ``rdf:resource``, ``rdf:nodeID``, exactly one nested node element,
or character data (a literal, with ``xml:lang`` inherited and ``rdf:datatype``
honoured).  Attributes in a non-RDF namespace on a node element, or on an
otherwise empty property element, abbreviate string-valued properties.

Constructs outside the subset (``rdf:parseType``, ``rdf:ID``, ``rdf:li``,
containers, ``xml:base``, reification attributes) are rejected with
:class:`UnsupportedConstructError` naming the construct.  Unknown attributes
in the RDF namespace, and attributes in no namespace, are dropped with an
``UNKNOWN_ATTRIBUTE`` warning on the resulting graph.
"""

from __future__ import annotations

import io
import xml.sax
import xml.sax.handler
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from execdesc import ns
from execdesc.errors import ExecdescError
from execdesc.rdf.model import (
    BlankNode,
    Graph,
    GraphBuilder,
    Iri,
    Literal,
    Subject,
    Term,
    is_absolute_iri,
    n3,
    resolve_reference,
)


class RdfParseError(ExecdescError):
    """Raised when a document cannot be read as the supported RDF/XML subset."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
            message = message + where
        super().__init__(message)


class UnsupportedConstructError(RdfParseError):
    """An RDF/XML feature outside the supported subset was encountered."""

    def __init__(self, construct: str, line: Optional[int] = None, column: Optional[int] = None):
        self.construct = construct
        super().__init__(f"unsupported RDF/XML construct: {construct}", line, column)


# rdf:* attributes the subset understands on node / property elements.
_NODE_ATTRS = {"about", "nodeID"}
_PROPERTY_ATTRS = {"resource", "nodeID", "datatype"}
# rdf:* attributes that are recognised but deliberately unsupported; anything
# else in the RDF namespace is unknown and only warned about.
_REJECTED_RDF_ATTRS = {
    "ID": "rdf:ID",
    "parseType": "rdf:parseType",
    "aboutEach": "rdf:aboutEach",
    "aboutEachPrefix": "rdf:aboutEachPrefix",
    "bagID": "rdf:bagID",
}

_EXTENSIONS = {".rdf", ".xml"}


@dataclass
class _RootFrame:
    pass


@dataclass
class _NodeFrame:
    subject: Subject


@dataclass
class _PropertyFrame:
    subject: Subject
    predicate: Iri
    lang: Optional[str]
    datatype: Optional[Iri] = None
    object: Optional[Term] = None
    saw_node_child: bool = False
    attr_literals: list[tuple[Iri, str]] = field(default_factory=list)
    text: list[str] = field(default_factory=list)


_Frame = Union[_RootFrame, _NodeFrame, _PropertyFrame]


class _Handler(xml.sax.handler.ContentHandler):
    def __init__(self, base: str):
        super().__init__()
        if not is_absolute_iri(base):
            raise ValueError(f"base IRI must be absolute: {base!r}")
        self.builder = GraphBuilder(base)
        self._base = self.builder.base
        self._stack: list[_Frame] = []
        self._langs: list[Optional[str]] = [None]
        self._named_bnodes: dict[str, BlankNode] = {}
        self._locator = None

    # -- position helpers ---------------------------------------------------

    def setDocumentLocator(self, locator):
        self._locator = locator

    def _pos(self) -> tuple[Optional[int], Optional[int]]:
        if self._locator is None:
            return None, None
        line = self._locator.getLineNumber()
        column = self._locator.getColumnNumber()
        return (line if line != -1 else None, column if column != -1 else None)

    def _fail(self, message: str):
        line, column = self._pos()
        raise RdfParseError(message, line, column)

    def _unsupported(self, construct: str):
        line, column = self._pos()
        raise UnsupportedConstructError(construct, line, column)

    def _warn(self, code: str, message: str):
        line, column = self._pos()
        self.builder.warn(code, message, line, column)

    # -- naming helpers -----------------------------------------------------

    @staticmethod
    def _element_iri(name: tuple[Optional[str], str]) -> Iri:
        uri, local = name
        if uri is None:
            # Elements with no namespace in scope belong to the execution
            # description vocabulary.
            uri = ns.ED
        return Iri(uri + local)

    def _display_name(self, name: tuple[Optional[str], str]) -> str:
        uri, local = name
        if uri is None:
            return local
        for prefix, known in ns.WELL_KNOWN_PREFIXES.items():
            if known == uri and prefix:
                return f"{prefix}:{local}"
        return "{" + uri + "}" + local

    def _named_bnode(self, label: str) -> BlankNode:
        node = self._named_bnodes.get(label)
        if node is None:
            node = self.builder.bnode()
            self._named_bnodes[label] = node
        return node

    def _resolve(self, reference: str) -> Iri:
        try:
            return resolve_reference(self._base, reference)
        except ValueError as exc:
            self._fail(str(exc))
            raise  # unreachable; keeps type checkers honest

    # -- attribute classification -------------------------------------------

    def _split_attrs(self, attrs, element_kind: str):
        """Sort attributes into rdf:* directives and property literals.

        Returns ``(rdf_attrs, property_attrs)``.  Unknown rdf:* attributes,
        attributes in no namespace, and stray xml:* attributes other than
        ``xml:lang`` are warned about and dropped.  Deliberately unsupported
        constructs raise.
        """
        rdf_attrs: dict[str, str] = {}
        property_attrs: list[tuple[Iri, str]] = []
        allowed = _NODE_ATTRS if element_kind == "node" else _PROPERTY_ATTRS
        for name in attrs.getNames():
            uri, local = name
            value = attrs.getValue(name)
            if uri == ns.RDF:
                if local in _REJECTED_RDF_ATTRS:
                    self._unsupported(_REJECTED_RDF_ATTRS[local])
                if local in ("about", "resource", "nodeID", "datatype") and local not in allowed:
                    self._unsupported(f"rdf:{local} on a {element_kind} element")
                if local not in allowed:
                    self._warn(
                        "UNKNOWN_ATTRIBUTE",
                        f"ignoring unknown attribute rdf:{local} on a {element_kind} element",
                    )
                    continue
                rdf_attrs[local] = value
            elif uri == ns.XML:
                if local == "base":
                    self._unsupported("xml:base")
                if local != "lang":
                    self._warn("UNKNOWN_ATTRIBUTE", f"ignoring attribute xml:{local}")
                continue
            elif uri is None:
                self._warn(
                    "UNKNOWN_ATTRIBUTE",
                    f"ignoring attribute {local!r}: no namespace in scope for attributes",
                )
                continue
            else:
                property_attrs.append((Iri(uri + local), value))
        return rdf_attrs, property_attrs

    # -- SAX callbacks ------------------------------------------------------

    def startPrefixMapping(self, prefix, uri):
        self.builder.set_namespace(prefix or "", uri)

    def startElementNS(self, name, qname, attrs):
        lang = attrs.get((ns.XML, "lang"), self._langs[-1])
        if lang == "":
            # xml:lang="" cancels any inherited language.
            lang = None
        self._langs.append(lang)

        if not self._stack:
            if name != (ns.RDF, "RDF"):
                self._fail(
                    f"document element must be rdf:RDF, got {self._display_name(name)}"
                )
            for attr_name in attrs.getNames():
                uri, local = attr_name
                if uri == ns.XML and local == "lang":
                    continue
                if uri == ns.XML and local == "base":
                    self._unsupported("xml:base")
                self._warn(
                    "UNKNOWN_ATTRIBUTE",
                    f"ignoring attribute on rdf:RDF: {self._display_name(attr_name)}",
                )
            self._stack.append(_RootFrame())
            return

        frame = self._stack[-1]
        if isinstance(frame, (_RootFrame, _PropertyFrame)):
            self._start_node_element(name, attrs, frame, lang)
        else:
            self._start_property_element(name, attrs, frame, lang)

    def _start_node_element(self, name, attrs, parent: _Frame, lang: Optional[str]):
        if name == (ns.RDF, "RDF"):
            self._fail("rdf:RDF is only allowed as the document element")
        if name == (ns.RDF, "li"):
            self._unsupported("rdf:li")
        if name[0] == ns.XML:
            self._fail(f"unexpected element {self._display_name(name)}")

        rdf_attrs, property_attrs = self._split_attrs(attrs, "node")
        if "about" in rdf_attrs and "nodeID" in rdf_attrs:
            self._fail("a node element cannot carry both rdf:about and rdf:nodeID")

        subject: Subject
        if "about" in rdf_attrs:
            subject = self._resolve(rdf_attrs["about"])
        elif "nodeID" in rdf_attrs:
            subject = self._named_bnode(rdf_attrs["nodeID"])
        else:
            subject = self.builder.bnode()

        if name != (ns.RDF, "Description"):
            self.builder.add(subject, ns.RDF_TYPE, self._element_iri(name))
        for predicate, value in property_attrs:
            self.builder.add(subject, predicate, Literal(value, language=lang))

        if isinstance(parent, _PropertyFrame):
            if parent.object is not None or parent.saw_node_child:
                self._fail(
                    f"property element {n3(parent.predicate)} has more than one object"
                )
            if any(chunk.strip() for chunk in parent.text):
                self._fail(
                    "property element mixes character data with a nested node element"
                )
            parent.text.clear()
            parent.saw_node_child = True
            parent.object = subject
            self.builder.add(parent.subject, parent.predicate, subject)

        self._stack.append(_NodeFrame(subject))

    def _start_property_element(self, name, attrs, parent: _NodeFrame, lang: Optional[str]):
        if name in ((ns.RDF, "RDF"), (ns.RDF, "Description")):
            self._fail(f"{self._display_name(name)} is not allowed as a property element")
        if name == (ns.RDF, "li"):
            self._unsupported("rdf:li")

        predicate = self._element_iri(name)
        rdf_attrs, property_attrs = self._split_attrs(attrs, "property")
        if "resource" in rdf_attrs and "nodeID" in rdf_attrs:
            self._fail("a property element cannot carry both rdf:resource and rdf:nodeID")
        if "datatype" in rdf_attrs and ("resource" in rdf_attrs or "nodeID" in rdf_attrs):
            self._fail("rdf:datatype only applies to literal content")

        frame = _PropertyFrame(subject=parent.subject, predicate=predicate, lang=lang)
        if "datatype" in rdf_attrs:
            datatype = rdf_attrs["datatype"]
            if not is_absolute_iri(datatype):
                datatype = self._resolve(datatype)
            frame.datatype = Iri(datatype)
        if "resource" in rdf_attrs:
            frame.object = self._resolve(rdf_attrs["resource"])
        elif "nodeID" in rdf_attrs:
            frame.object = self._named_bnode(rdf_attrs["nodeID"])
        frame.attr_literals = property_attrs
        self._stack.append(frame)

    def characters(self, content):
        if not self._stack:
            return
        frame = self._stack[-1]
        if isinstance(frame, _PropertyFrame):
            frame.text.append(content)
        elif content.strip():
            self._fail("character data is not allowed between node elements")

    def endElementNS(self, name, qname):
        self._langs.pop()
        frame = self._stack.pop()
        if isinstance(frame, _PropertyFrame):
            self._finish_property(frame)

    def _finish_property(self, frame: _PropertyFrame):
        text = "".join(frame.text)
        if frame.object is not None:
            if frame.saw_node_child and frame.attr_literals:
                self._fail(
                    "property element mixes attribute literals with a nested node element"
                )
            if text.strip():
                self._fail(
                    "property element mixes character data with a resource object"
                )
            if frame.datatype is not None:
                self._fail("rdf:datatype only applies to literal content")
            if not frame.saw_node_child:
                # rdf:resource / rdf:nodeID form; emit now, then let any
                # attribute literals describe the referenced node.
                self.builder.add(frame.subject, frame.predicate, frame.object)
                assert not isinstance(frame.object, Literal)
                for predicate, value in frame.attr_literals:
                    self.builder.add(frame.object, predicate, Literal(value, language=frame.lang))
            return

        if frame.attr_literals:
            if text.strip():
                self._fail(
                    "property element mixes character data with attribute literals"
                )
            node = self.builder.bnode()
            self.builder.add(frame.subject, frame.predicate, node)
            for predicate, value in frame.attr_literals:
                self.builder.add(node, predicate, Literal(value, language=frame.lang))
            return

        if frame.datatype is not None:
            literal = Literal(text, datatype=frame.datatype)
        else:
            literal = Literal(text, language=frame.lang)
        self.builder.add(frame.subject, frame.predicate, literal)


def parse_rdf_xml(data: Union[bytes, str], base: str) -> Graph:
    """Parse RDF/XML ``data`` into a :class:`Graph` with the given base IRI.

    Raises :class:`RdfParseError` (or its :class:`UnsupportedConstructError`
    subclass) on malformed XML, documents outside the supported subset, or a
    relative ``base``.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        handler = _Handler(base)
    except ValueError as exc:
        raise RdfParseError(str(exc)) from exc
    parser = xml.sax.make_parser()
    parser.setFeature(xml.sax.handler.feature_namespaces, True)
    try:
        parser.setFeature(xml.sax.handler.feature_external_ges, False)
    except (xml.sax.SAXNotRecognizedException, xml.sax.SAXNotSupportedException):
        pass
    parser.setContentHandler(handler)
    parser.setErrorHandler(xml.sax.handler.ErrorHandler())
    try:
        parser.parse(io.BytesIO(data))
    except xml.sax.SAXParseException as exc:
        line = exc.getLineNumber()
        column = exc.getColumnNumber()
        raise RdfParseError(
            f"not well-formed XML: {exc.getMessage()}",
            line if line != -1 else None,
            column if column != -1 else None,
        ) from exc
    graph = handler.builder.build()
    if "" not in graph.namespaces:
        # Documents may use unprefixed vocabulary elements without declaring a
        # default namespace; keep the implied mapping for serialization.
        namespaces = dict(graph.namespaces)
        namespaces[""] = ns.ED
        graph = Graph(
            triples=graph.triples,
            base=graph.base,
            namespaces=namespaces,
            warnings=graph.warnings,
        )
    return graph


def load_rdf_xml(path: Union[str, Path], base: Optional[str] = None) -> Graph:
    """Read an execution description file.

    ``base`` defaults to the file's URI, so fragment references inside the
    document resolve to IRIs rooted at the file itself.  Only ``.rdf`` and
    ``.xml`` files are accepted.
    """
    path = Path(path)
    if path.suffix.lower() not in _EXTENSIONS:
        raise RdfParseError(
            f"unsupported file extension {path.suffix!r} for {path.name}: expected .rdf or .xml"
        )
    data = path.read_bytes()
    if base is None:
        base = path.resolve().as_uri()
    return parse_rdf_xml(data, base)
