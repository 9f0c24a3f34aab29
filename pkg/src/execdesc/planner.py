"""Dependency closure, deterministic ordering, and plan construction.

Plans are fully deterministic: among simultaneously-ready processes the
lexicographically smallest IRI runs first, so identical inputs always produce
identical plans.  Each step carries its declared dependencies so the executor
can honor the partial order when running steps in parallel.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping

from execdesc.description import ExecutionDescription
from execdesc.errors import ExecdescError
from execdesc.rdf import Iri


class PlanError(ExecdescError):
    """A plan cannot be built from the given description and targets."""


class UnknownProcessError(PlanError):
    def __init__(self, iri: Iri):
        self.iri = iri
        super().__init__(f"no process <{iri}> in this description")


class DanglingDependencyError(PlanError):
    def __init__(self, dependent: Iri, target: Iri):
        self.dependent = dependent
        self.target = target
        super().__init__(
            f"<{dependent}> depends on <{target}>, which is not a process in this description"
        )


class CycleError(PlanError):
    """Raised when the requested processes depend on each other circularly.

    ``path`` is one explicit cycle, closed (first element repeated last) and
    rotated to start at its lexicographically smallest member.
    """

    def __init__(self, path: list[Iri]):
        self.path = list(path)
        super().__init__("dependency cycle: " + " -> ".join(f"<{p}>" for p in self.path))


@dataclass(frozen=True)
class PlanStep:
    process: Iri
    bound_command: str
    depends_on: tuple[Iri, ...] = ()


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]
    targets: tuple[Iri, ...]
    unused_bindings: tuple[str, ...] = ()

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def dependency_closure(description: ExecutionDescription, targets: Iterable[Iri]) -> set[Iri]:
    """Smallest set containing ``targets`` and closed under depends_on."""
    frontier: list[Iri] = []
    for target in targets:
        target = Iri(target)
        if target not in description.processes:
            raise UnknownProcessError(target)
        frontier.append(target)
    closure: set[Iri] = set()
    while frontier:
        current = frontier.pop()
        if current in closure:
            continue
        closure.add(current)
        for dep in description.processes[current].depends_on:
            if dep not in description.processes:
                raise DanglingDependencyError(current, dep)
            frontier.append(dep)
    return closure


def _find_cycle(nodes: set[Iri], edges: Mapping[Iri, tuple[Iri, ...]]) -> list[Iri]:
    # Walk depends_on edges from the smallest stuck node until one repeats.
    start = min(nodes)
    seen: dict[Iri, int] = {}
    path: list[Iri] = []
    current = start
    while current not in seen:
        seen[current] = len(path)
        path.append(current)
        current = min(d for d in edges[current] if d in nodes)
    cycle = path[seen[current]:]
    pivot = cycle.index(min(cycle))
    cycle = cycle[pivot:] + cycle[:pivot]
    return cycle + [cycle[0]]


def topological_order(description: ExecutionDescription, nodes: Iterable[Iri]) -> list[Iri]:
    """Dependencies first; ties broken by smallest IRI.

    ``nodes`` must be closed under depends_on (use dependency_closure).
    Raises CycleError with an explicit cycle path when no order exists.
    """
    members = {Iri(n) for n in nodes}
    edges: dict[Iri, tuple[Iri, ...]] = {}
    for node in members:
        if node not in description.processes:
            raise UnknownProcessError(node)
        deps = description.processes[node].depends_on
        for dep in deps:
            if dep not in members:
                raise PlanError(
                    f"node set is not dependency-closed: <{node}> needs <{dep}>"
                )
        edges[node] = deps

    pending = {node: len(edges[node]) for node in members}
    dependents: dict[Iri, list[Iri]] = {node: [] for node in members}
    for node, deps in edges.items():
        for dep in deps:
            dependents[dep].append(node)

    ready = [node for node, count in pending.items() if count == 0]
    heapq.heapify(ready)
    order: list[Iri] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for dependent in dependents[node]:
            pending[dependent] -= 1
            if pending[dependent] == 0:
                heapq.heappush(ready, dependent)
    if len(order) != len(members):
        stuck = {node for node in members if pending[node] > 0}
        raise CycleError(_find_cycle(stuck, edges))
    return order


def build_plan(
    description: ExecutionDescription,
    targets: Iterable[Iri],
    bindings: Mapping[str, str] = (),
    strict: bool = False,
) -> Plan:
    """Closure, order, and parameter binding in one deterministic step.

    ``bindings`` is shared across all steps; each command only consumes the
    names it mentions.  Names no step uses are reported on the plan, and
    rejected outright when ``strict`` is set.
    """
    # Imported here: the executor owns binding but also consumes Plan objects,
    # so a top-level import either way would be circular.
    from execdesc.executor import BindingError, bind_parameters

    wanted = tuple(dict.fromkeys(Iri(t) for t in targets))
    if not wanted:
        raise PlanError("at least one target process is required")
    bindings = dict(bindings)
    order = topological_order(description, dependency_closure(description, wanted))

    steps = []
    used: set[str] = set()
    for iri in order:
        descriptor = description.processes[iri]
        names = set(descriptor.command.placeholders)
        used |= names
        relevant = {k: v for k, v in bindings.items() if k in names}
        bound = bind_parameters(descriptor.command, relevant, descriptor.parameters, strict=strict)
        steps.append(PlanStep(iri, bound, descriptor.depends_on))

    unused = sorted(set(bindings) - used)
    if unused and strict:
        raise BindingError(
            "unused parameter bindings: " + ", ".join(unused)
        )
    return Plan(steps=tuple(steps), targets=wanted, unused_bindings=tuple(unused))
