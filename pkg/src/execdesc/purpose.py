"""Purpose model: what a documented command is for, and queries over it.

Four purpose forms appear on processes: a plain text label, evidence backing
a publication, generation of a specific figure, and support for a claim
(either a remote claim IRI or an inline subject/predicate/object statement).
Purposes are recognized from the shapes around a process's ``ed:purpose``
objects; anything unrecognized degrades to a flagged label so extraction
stays total while validation can still point at it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Union
from urllib.parse import urldefrag

from execdesc import ns
from execdesc.rdf import BlankNode, Graph, Iri, Literal as RdfLiteral, Subject, n3

if TYPE_CHECKING:
    from execdesc.description import ExecutionDescription


# -- purpose variants --------------------------------------------------------


@dataclass(frozen=True)
class Label:
    text: str
    language: Optional[str] = None


@dataclass(frozen=True)
class EvidenceFor:
    document: Iri

    def __post_init__(self):
        object.__setattr__(self, "document", Iri(self.document))


@dataclass(frozen=True)
class GeneratesFigure:
    title: Optional[str] = None
    part_of: Optional[Iri] = None

    def __post_init__(self):
        if self.part_of is not None:
            object.__setattr__(self, "part_of", Iri(self.part_of))


@dataclass(frozen=True)
class RemoteClaim:
    claim: Iri

    def __post_init__(self):
        object.__setattr__(self, "claim", Iri(self.claim))


@dataclass(frozen=True)
class InlineClaim:
    subject: Iri
    predicate: Iri
    object: Iri

    def __post_init__(self):
        object.__setattr__(self, "subject", Iri(self.subject))
        object.__setattr__(self, "predicate", Iri(self.predicate))
        object.__setattr__(self, "object", Iri(self.object))


ClaimRef = Union[RemoteClaim, InlineClaim]


@dataclass(frozen=True)
class SupportsClaim:
    target: ClaimRef


Purpose = Union[Label, EvidenceFor, GeneratesFigure, SupportsClaim]


# -- queries -----------------------------------------------------------------


@dataclass(frozen=True)
class ByLabel:
    """Match Label purposes: ``exact`` is case-sensitive, ``substring`` is not."""

    text: str
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "substring"):
            raise ValueError(f"unknown label match mode: {self.mode!r}")


@dataclass(frozen=True)
class ByDocument:
    document: Iri

    def __post_init__(self):
        object.__setattr__(self, "document", Iri(self.document))


@dataclass(frozen=True)
class ByFigure:
    document: Iri
    title: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "document", Iri(self.document))


@dataclass(frozen=True)
class ByClaim:
    claim: ClaimRef


PurposeQuery = Union[ByLabel, ByDocument, ByFigure, ByClaim]


def strip_fragment(iri: str) -> Iri:
    return Iri(urldefrag(iri)[0])


def matches(purpose: Purpose, query: PurposeQuery) -> bool:
    """Decide whether one purpose satisfies one query.

    Document comparison is exact IRI equality (no scheme or resolver
    normalization); only a remote claim's fragment is dropped when matching
    ByDocument, so claims inside a page count as referencing the page.
    """
    if isinstance(query, ByLabel):
        if not isinstance(purpose, Label):
            return False
        if query.mode == "exact":
            return purpose.text == query.text
        return query.text.lower() in purpose.text.lower()
    if isinstance(query, ByDocument):
        if isinstance(purpose, EvidenceFor):
            return purpose.document == query.document
        if isinstance(purpose, GeneratesFigure):
            return purpose.part_of == query.document
        if isinstance(purpose, SupportsClaim) and isinstance(purpose.target, RemoteClaim):
            return strip_fragment(purpose.target.claim) == query.document
        return False
    if isinstance(query, ByFigure):
        return (
            isinstance(purpose, GeneratesFigure)
            and purpose.part_of == query.document
            and (query.title is None or purpose.title == query.title)
        )
    if isinstance(query, ByClaim):
        return isinstance(purpose, SupportsClaim) and purpose.target == query.claim
    raise TypeError(f"not a purpose query: {query!r}")


# -- extraction --------------------------------------------------------------


def _first_iri(g: Graph, subject, predicate) -> Optional[Iri]:
    for o in g.objects(subject, predicate):
        if isinstance(o, Iri):
            return o
    return None


def _first_literal(g: Graph, subject, predicate) -> Optional[RdfLiteral]:
    for o in g.objects(subject, predicate):
        if isinstance(o, RdfLiteral):
            return o
    return None


def _inline_claim(g: Graph, statement) -> Optional[InlineClaim]:
    s = _first_iri(g, statement, ns.ED_SUBJECT)
    p = _first_iri(g, statement, ns.ED_PREDICATE)
    o = _first_iri(g, statement, ns.ED_OBJECT)
    if s is not None and p is not None and o is not None:
        return InlineClaim(s, p, o)
    return None


def _recognize(g: Graph, obj) -> Optional[Purpose]:
    if isinstance(obj, RdfLiteral):
        return Label(obj.lexical, obj.language)

    evidence = _first_iri(g, obj, ns.CITO_CITED_AS_EVIDENCE_BY)
    if evidence is not None:
        return EvidenceFor(evidence)

    types = g.objects(obj, ns.RDF_TYPE)
    generated = g.objects(obj, ns.PROV_GENERATED)
    if ns.PROV_GENERATED in types or generated:
        if ns.PROV_GENERATED in types:
            figures = g.objects(obj, ns.DOCO_FIGURE)
            figure = figures[0] if figures else None
        else:
            # Property chain: purpose node -> prov:generated -> figure holder.
            holder = generated[0]
            figures = g.objects(holder, ns.DOCO_FIGURE) if not isinstance(holder, RdfLiteral) else []
            figure = figures[0] if figures else holder
        title = part_of = None
        if figure is not None and not isinstance(figure, RdfLiteral):
            title_lit = _first_literal(g, figure, ns.DC_TITLE)
            title = title_lit.lexical if title_lit else None
            part_of = _first_iri(g, figure, ns.DC_IS_PART_OF)
        return GeneratesFigure(title, part_of)

    if ns.CITO_SUPPORTS in types:
        for statement in g.objects(obj, ns.WIKIBASE_STATEMENT):
            if isinstance(statement, RdfLiteral):
                continue
            inline = _inline_claim(g, statement)
            if inline is not None:
                return SupportsClaim(inline)
        return None

    for target in g.objects(obj, ns.CITO_SUPPORTS):
        if isinstance(target, Iri):
            return SupportsClaim(RemoteClaim(target))
        if isinstance(target, RdfLiteral):
            continue
        if ns.WIKIBASE_STATEMENT in g.objects(target, ns.RDF_TYPE):
            statement = target
        else:
            statements = [
                o for o in g.objects(target, ns.WIKIBASE_STATEMENT)
                if not isinstance(o, RdfLiteral)
            ]
            statement = statements[0] if statements else None
        if statement is not None:
            inline = _inline_claim(g, statement)
            if inline is not None:
                return SupportsClaim(inline)
    return None


def _purpose_key(p: Purpose):
    if isinstance(p, Label):
        return (0, p.text, p.language or "", "", "")
    if isinstance(p, EvidenceFor):
        return (1, str(p.document), "", "", "")
    if isinstance(p, GeneratesFigure):
        return (2, p.title or "", str(p.part_of or ""), "", "")
    target = p.target
    if isinstance(target, RemoteClaim):
        return (3, "remote", str(target.claim), "", "")
    return (3, "inline", str(target.subject), str(target.predicate), str(target.object))


def analyze_purposes(g: Graph, process: Subject):
    """All purposes of ``process`` plus the unrecognized purpose nodes.

    Returns ``(purposes, unrecognized)`` where ``unrecognized`` holds the
    serialized form of each purpose object no recognizer understood; those
    still appear in ``purposes`` as flagged labels.  Purposes come back
    sorted by content, so the order is independent of document layout.
    """
    purposes: list[Purpose] = []
    unrecognized: list[str] = []
    for obj in g.objects(process, ns.ED_PURPOSE):
        purpose = _recognize(g, obj)
        if purpose is None:
            unrecognized.append(n3(obj))
            purpose = Label(n3(obj))
        purposes.append(purpose)
    purposes.sort(key=_purpose_key)
    return tuple(purposes), tuple(unrecognized)


def extract_purposes(g: Graph, process: Subject) -> list[Purpose]:
    return list(analyze_purposes(g, process)[0])


def select_processes(description: "ExecutionDescription", query: PurposeQuery) -> list[Iri]:
    """IRIs of processes with at least one purpose matching ``query``, sorted."""
    hits = [
        iri
        for iri, descriptor in description.processes.items()
        if any(matches(p, query) for p in descriptor.purposes)
    ]
    return sorted(hits)
