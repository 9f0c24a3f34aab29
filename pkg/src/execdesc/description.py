"""Typed view over a parsed description graph, plus validation.

``extract`` lifts triples into process descriptors and is total: whatever is
malformed simply yields no descriptor.  ``validate`` reports the problems as
diagnostics drawn from a fixed registry:

===========================  ========  =============================================
code                         severity  meaning
===========================  ========  =============================================
MISSING_COMMAND              error     process-shaped subject without a command
DANGLING_DEPENDENCY          error     dependsOn target that is not a process here
DEPENDENCY_CYCLE             error     circular dependsOn chain
UNDECLARED_PLACEHOLDER       warning   ``${name}`` with no declared parameter
UNKNOWN_ATTRIBUTE            warning   attribute dropped while parsing the document
UNRECOGNIZED_PURPOSE         warning   purpose node shape no recognizer understood
ANONYMOUS_PROCESS            warning   process on a blank node, unaddressable
===========================  ========  =============================================

When a subject carries several command literals, the lexicographically first
one is used; parameter nodes without a label, and bounds that do not parse
as numbers, are ignored rather than fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from execdesc import ns, purpose as purpose_model
from execdesc.rdf import BlankNode, Graph, Iri, Literal, Subject, n3

_PLACEHOLDER = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

_SEVERITIES = ("error", "warning")


@dataclass(frozen=True)
class CommandTemplate:
    """A shell command line, possibly with ``${name}`` placeholders."""

    raw: str

    @property
    def placeholders(self) -> tuple[str, ...]:
        """Placeholder names in first-occurrence order, without duplicates."""
        seen: dict[str, None] = {}
        for match in _PLACEHOLDER.finditer(self.raw):
            seen.setdefault(match.group(1), None)
        return tuple(seen)


@dataclass(frozen=True)
class ParameterSpec:
    """Declared parameter: a numeric range, an enumeration, or unconstrained."""

    name: str
    minimum: Optional[float] = None
    maximum: Optional[float] = None
    allowed: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "allowed", tuple(self.allowed))
        if self.allowed and (self.minimum is not None or self.maximum is not None):
            raise ValueError(f"parameter {self.name!r} mixes numeric bounds with allowed values")
        if self.minimum is not None and self.maximum is not None and self.minimum > self.maximum:
            raise ValueError(f"parameter {self.name!r} has minimum above maximum")

    @property
    def kind(self) -> str:
        if self.allowed:
            return "enumeration"
        if self.minimum is not None or self.maximum is not None:
            return "numeric-range"
        return "unconstrained"


@dataclass(frozen=True)
class ProcessDescriptor:
    id: Iri
    command: CommandTemplate
    purposes: tuple = ()
    depends_on: tuple[Iri, ...] = ()
    parameters: tuple[ParameterSpec, ...] = ()

    def parameter(self, name: str) -> Optional[ParameterSpec]:
        for spec in self.parameters:
            if spec.name == name:
                return spec
        return None


@dataclass(frozen=True)
class ExecutionDescription:
    base: Iri
    processes: Mapping[Iri, ProcessDescriptor]
    source_graph: Graph

    def __iter__(self):
        return iter(self.processes.values())

    def __len__(self) -> int:
        return len(self.processes)

    def process_ids(self) -> list[Iri]:
        return sorted(self.processes)

    def get(self, iri: Iri) -> Optional[ProcessDescriptor]:
        return self.processes.get(Iri(iri))


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    subject: Optional[Iri]
    message: str

    def __post_init__(self):
        if self.severity not in _SEVERITIES:
            raise ValueError(f"unknown severity: {self.severity!r}")

    def __str__(self) -> str:
        where = f" <{self.subject}>" if self.subject else ""
        return f"{self.severity}: {self.code}{where}: {self.message}"


def _diagnostic_key(d: Diagnostic):
    return (_SEVERITIES.index(d.severity), str(d.subject or ""), d.code, d.message)


def _process_like_subjects(g: Graph) -> list[Subject]:
    typed = set(g.subjects(ns.RDF_TYPE, ns.ED_PROCESS))
    commanded = {t.subject for t in g.matching(predicate=ns.ED_COMMAND)}
    return sorted(typed | commanded, key=n3)


def _first_command(g: Graph, subject: Subject) -> Optional[CommandTemplate]:
    for obj in g.objects(subject, ns.ED_COMMAND):
        if isinstance(obj, Literal):
            return CommandTemplate(obj.lexical)
    return None


def _number(obj) -> Optional[float]:
    if not isinstance(obj, Literal):
        return None
    try:
        return float(obj.lexical)
    except ValueError:
        return None


def _parameters(g: Graph, subject: Subject) -> tuple[ParameterSpec, ...]:
    specs: list[ParameterSpec] = []
    seen: set[str] = set()
    for node in g.objects(subject, ns.WFDESC_PARAMETER):
        if isinstance(node, Literal):
            continue
        label = None
        for obj in g.objects(node, ns.RDFS_LABEL):
            if isinstance(obj, Literal):
                label = obj.lexical
                break
        if label is None or label in seen:
            continue
        seen.add(label)
        allowed = tuple(
            o.lexical for o in g.objects(node, ns.ED_ALLOWED_VALUE) if isinstance(o, Literal)
        )
        minimum = maximum = None
        for obj in g.objects(node, ns.ED_MIN_VALUE):
            minimum = _number(obj)
            if minimum is not None:
                break
        for obj in g.objects(node, ns.ED_MAX_VALUE):
            maximum = _number(obj)
            if maximum is not None:
                break
        if allowed:
            # Mixed declarations keep the enumeration; bounds are dropped.
            minimum = maximum = None
        elif minimum is not None and maximum is not None and minimum > maximum:
            # Contradictory range degrades to unconstrained.
            minimum = maximum = None
        specs.append(ParameterSpec(label, minimum, maximum, allowed))
    return tuple(specs)


def extract(g: Graph) -> ExecutionDescription:
    """Build the typed view; never fails on a well-formed graph."""
    processes: dict[Iri, ProcessDescriptor] = {}
    for subject in _process_like_subjects(g):
        if not isinstance(subject, Iri):
            continue
        command = _first_command(g, subject)
        if command is None:
            continue
        depends_on = tuple(
            dict.fromkeys(o for o in g.objects(subject, ns.ED_DEPENDS_ON) if isinstance(o, Iri))
        )
        purposes, _ = purpose_model.analyze_purposes(g, subject)
        processes[subject] = ProcessDescriptor(
            id=subject,
            command=command,
            purposes=purposes,
            depends_on=depends_on,
            parameters=_parameters(g, subject),
        )
    return ExecutionDescription(base=g.base, processes=processes, source_graph=g)


def _cyclic_groups(processes: Mapping[Iri, ProcessDescriptor]) -> list[list[Iri]]:
    """Strongly connected groups of size > 1, plus self-loops."""
    edges = {
        iri: [d for d in desc.depends_on if d in processes]
        for iri, desc in processes.items()
    }
    index_counter = [0]
    stack: list[Iri] = []
    on_stack: set[Iri] = set()
    index: dict[Iri, int] = {}
    low: dict[Iri, int] = {}
    groups: list[list[Iri]] = []

    def strongconnect(v: Iri):
        index[v] = low[v] = index_counter[0]
        index_counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges[v]:
            if w not in index:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            group = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                group.append(w)
                if w == v:
                    break
            if len(group) > 1 or v in edges[v]:
                groups.append(sorted(group))

    for v in sorted(edges):
        if v not in index:
            strongconnect(v)
    return sorted(groups)


def validate(description: ExecutionDescription) -> list[Diagnostic]:
    """Check one description; returns diagnostics sorted by severity then subject."""
    g = description.source_graph
    found: list[Diagnostic] = []

    for warning in g.warnings:
        found.append(Diagnostic("warning", warning.code, None, warning.message))

    for subject in _process_like_subjects(g):
        if isinstance(subject, BlankNode):
            found.append(
                Diagnostic(
                    "warning",
                    "ANONYMOUS_PROCESS",
                    None,
                    f"process on blank node {n3(subject)} cannot be addressed; give it rdf:about",
                )
            )

    purpose_bearing = {t.subject for t in g.matching(predicate=ns.ED_PURPOSE)}
    for subject in sorted(set(_process_like_subjects(g)) | purpose_bearing, key=n3):
        if not isinstance(subject, Iri) or subject in description.processes:
            continue
        if _first_command(g, subject) is None and (
            subject in purpose_bearing
            or g.matching(subject, ns.RDF_TYPE, ns.ED_PROCESS)
        ):
            found.append(
                Diagnostic(
                    "error",
                    "MISSING_COMMAND",
                    subject,
                    "process declares no ed:command, so it cannot be run",
                )
            )

    for iri, descriptor in description.processes.items():
        for target in descriptor.depends_on:
            if target not in description.processes:
                found.append(
                    Diagnostic(
                        "error",
                        "DANGLING_DEPENDENCY",
                        iri,
                        f"depends on <{target}>, which is not a process in this description",
                    )
                )
        declared = {spec.name for spec in descriptor.parameters}
        for name in descriptor.command.placeholders:
            if name not in declared:
                found.append(
                    Diagnostic(
                        "warning",
                        "UNDECLARED_PLACEHOLDER",
                        iri,
                        f"command references ${{{name}}} but declares no matching parameter",
                    )
                )
        _, unrecognized = purpose_model.analyze_purposes(g, iri)
        for node in unrecognized:
            found.append(
                Diagnostic(
                    "warning",
                    "UNRECOGNIZED_PURPOSE",
                    iri,
                    f"purpose {node} has no recognizable shape; treated as a plain label",
                )
            )

    for group in _cyclic_groups(description.processes):
        found.append(
            Diagnostic(
                "error",
                "DEPENDENCY_CYCLE",
                group[0],
                "dependency cycle involving " + ", ".join(f"<{m}>" for m in group),
            )
        )

    found.sort(key=_diagnostic_key)
    return found


def placeholders(template: CommandTemplate) -> tuple[str, ...]:
    return template.placeholders
