"""RDF data model: terms, triples and immutable graphs.

The model covers exactly what execution descriptions need: IRIs, blank
nodes, literals with an optional language tag or datatype, and a graph
that is a set of triples plus the base IRI and namespace prefixes it was
read with.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union
from urllib.parse import urljoin, urlsplit


class Iri(str):
    """An absolute IRI.  Equality and ordering are exact string comparison."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Iri({str.__repr__(self)})"


def is_absolute_iri(value: str) -> bool:
    """True when ``value`` carries a scheme."""
    return bool(urlsplit(value).scheme)


def resolve_reference(base: str, reference: str) -> Iri:
    """Resolve an IRI reference against ``base`` per RFC 3986.

    ``#frag`` becomes ``<base>#frag``; a bare relative name resolves as a
    sibling of the base document; an absolute reference is kept as is.
    """
    if is_absolute_iri(reference):
        return Iri(reference)
    return Iri(urljoin(base, reference))


@dataclass(frozen=True, slots=True)
class BlankNode:
    """A node with document-local identity only.

    Labels are unique within one graph; comparing blank nodes from
    different graphs by label is meaningless.
    """

    label: str

    def __repr__(self) -> str:
        return f"BlankNode({self.label!r})"


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal value: lexical form plus optional language tag or datatype.

    Language and datatype are mutually exclusive; with neither the literal
    is a plain string.
    """

    lexical: str
    language: Optional[str] = None
    datatype: Optional[Iri] = None

    def __post_init__(self) -> None:
        if self.language is not None and self.datatype is not None:
            raise ValueError("a literal cannot carry both a language tag and a datatype")


Subject = Union[Iri, BlankNode]
Term = Union[Iri, BlankNode, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise TypeError("a literal cannot be a triple subject")
        if not isinstance(self.predicate, Iri):
            raise TypeError("a triple predicate must be an IRI")


def n3(term: Term) -> str:
    """Serialized form of a term, used for deterministic ordering and display."""
    if isinstance(term, Iri):
        return f"<{term}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    escaped = term.lexical.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    if term.language is not None:
        return f'"{escaped}"@{term.language}'
    if term.datatype is not None:
        return f'"{escaped}"^^<{term.datatype}>'
    return f'"{escaped}"'


def triple_key(t: Triple) -> tuple[str, str, str]:
    return (n3(t.subject), n3(t.predicate), n3(t.object))


@dataclass(frozen=True, slots=True)
class ParseWarning:
    """A non-fatal problem noticed while reading a document."""

    code: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass(frozen=True)
class Graph:
    """An immutable set of triples with the base IRI and prefixes it was built with.

    Set semantics: duplicate triples collapse.  Safe to share across
    threads once constructed.
    """

    triples: frozenset[Triple]
    base: Iri
    namespaces: Mapping[str, str] = field(default_factory=dict)
    warnings: tuple[ParseWarning, ...] = ()

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.triples, key=triple_key))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.triples == other.triples and self.base == other.base

    def matching(
        self,
        subject: Optional[Subject] = None,
        predicate: Optional[Iri] = None,
        object: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples matching every given position, in deterministic order.

        Order is lexicographic over the serialized subject, predicate and
        object, so repeated calls agree across runs and platforms.
        """
        found = [
            t
            for t in self.triples
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (object is None or t.object == object)
        ]
        found.sort(key=triple_key)
        return found

    def objects(self, subject: Subject, predicate: Iri) -> list[Term]:
        return [t.object for t in self.matching(subject, predicate)]

    def subjects(self, predicate: Optional[Iri] = None, object: Optional[Term] = None) -> list[Subject]:
        """Distinct subjects of matching triples, in deterministic order."""
        seen: dict[Subject, None] = {}
        for t in self.matching(None, predicate, object):
            seen.setdefault(t.subject, None)
        return sorted(seen, key=n3)


class GraphBuilder:
    """Accumulates triples and mints blank nodes for one graph.

    Blank node labels are ``b0``, ``b1``, ... in creation order, which
    keeps programmatically built and parsed graphs deterministic.
    """

    def __init__(self, base: str) -> None:
        self.base = Iri(base)
        self._triples: set[Triple] = set()
        self._namespaces: dict[str, str] = {}
        self._warnings: list[ParseWarning] = []
        self._counter = 0

    def bnode(self) -> BlankNode:
        node = BlankNode(f"b{self._counter}")
        self._counter += 1
        return node

    def add(self, subject: Subject, predicate: Iri, object: Term) -> None:
        self._triples.add(Triple(subject, predicate, object))

    def set_namespace(self, prefix: str, iri: str) -> None:
        self._namespaces[prefix] = iri

    def warn(self, code: str, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self._warnings.append(ParseWarning(code, message, line, column))

    def build(self) -> Graph:
        return Graph(
            triples=frozenset(self._triples),
            base=self.base,
            namespaces=dict(self._namespaces),
            warnings=tuple(self._warnings),
        )


def graph_from_triples(
    triples: Iterable[Triple],
    base: str,
    namespaces: Optional[Mapping[str, str]] = None,
) -> Graph:
    return Graph(frozenset(triples), Iri(base), dict(namespaces or {}))
