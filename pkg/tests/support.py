"""Shared test helpers: graph isomorphism and quick graph construction."""

from __future__ import annotations

from typing import Iterable, Optional

from execdesc.rdf import BlankNode, Graph, Iri, Literal, Triple, graph_from_triples, n3

WILDCARD = "*"


def _is_bnode(term) -> bool:
    return isinstance(term, BlankNode)


def _signature(triples, node):
    """Orientation/predicate/ground-neighbour profile of one blank node."""
    out = []
    for t in triples:
        if t.subject == node:
            other = WILDCARD if _is_bnode(t.object) else n3(t.object)
            out.append(("s", str(t.predicate), other))
        if t.object == node:
            other = WILDCARD if _is_bnode(t.subject) else n3(t.subject)
            out.append(("o", str(t.predicate), other))
    return tuple(sorted(out))


def _substitute(t: Triple, mapping) -> Triple:
    s = mapping.get(t.subject, t.subject) if _is_bnode(t.subject) else t.subject
    o = mapping.get(t.object, t.object) if _is_bnode(t.object) else t.object
    return Triple(s, t.predicate, o)


def isomorphic(a: Graph, b: Graph) -> bool:
    """True when some blank-node bijection maps one triple set onto the other.

    Exhaustive backtracking over signature-compatible candidates; the
    signature grouping and incremental consistency checks only prune, so a
    ``False`` answer means no bijection exists at all.
    """
    ta, tb = set(a.triples), set(b.triples)
    if len(ta) != len(tb):
        return False
    nodes_a = sorted({n for t in ta for n in (t.subject, t.object) if _is_bnode(n)}, key=n3)
    nodes_b = sorted({n for t in tb for n in (t.subject, t.object) if _is_bnode(n)}, key=n3)
    if len(nodes_a) != len(nodes_b):
        return False
    ground_a = {t for t in ta if not _is_bnode(t.subject) and not _is_bnode(t.object)}
    ground_b = {t for t in tb if not _is_bnode(t.subject) and not _is_bnode(t.object)}
    if ground_a != ground_b:
        return False

    sig_a = {n: _signature(ta, n) for n in nodes_a}
    sig_b = {n: _signature(tb, n) for n in nodes_b}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False

    candidates = {n: [m for m in nodes_b if sig_b[m] == sig_a[n]] for n in nodes_a}
    touching = {n: [t for t in ta if t.subject == n or t.object == n] for n in nodes_a}
    order = sorted(nodes_a, key=lambda n: (len(candidates[n]), n3(n)))

    mapping: dict[BlankNode, BlankNode] = {}
    used: set[BlankNode] = set()

    def consistent(node) -> bool:
        for t in touching[node]:
            s_ok = not _is_bnode(t.subject) or t.subject in mapping
            o_ok = not _is_bnode(t.object) or t.object in mapping
            if s_ok and o_ok and _substitute(t, mapping) not in tb:
                return False
        return True

    def assign(i: int) -> bool:
        if i == len(order):
            return {_substitute(t, mapping) for t in ta} == tb
        node = order[i]
        for cand in candidates[node]:
            if cand in used:
                continue
            mapping[node] = cand
            used.add(cand)
            if consistent(node) and assign(i + 1):
                return True
            del mapping[node]
            used.discard(cand)
        return False

    return assign(0)


def lit(lexical: str, language: Optional[str] = None, datatype: Optional[str] = None) -> Literal:
    return Literal(lexical, language=language, datatype=Iri(datatype) if datatype else None)


def graph(triples: Iterable[tuple], base: str, namespaces=None) -> Graph:
    """Build a Graph from (s, p, o) tuples of ready-made terms or IRI strings."""

    def term(x):
        if isinstance(x, (Iri, BlankNode, Literal)):
            return x
        return Iri(x)

    return graph_from_triples(
        (Triple(term(s), Iri(p), term(o)) for s, p, o in triples),
        base,
        namespaces,
    )
