"""Interactive authoring of a description file.

Asks for the commands, what each one is for, the order constraints between
them, the publication they back, and bounds for any ``${placeholder}`` the
commands mention.  Everything is collected first and written in one shot at
the end, so aborting at any prompt leaves the directory untouched.
"""

from __future__ import annotations

import re
from pathlib import Path

import click

from execdesc import ns
from execdesc.rdf import GraphBuilder, Iri, Literal, resolve_reference, serialize_rdf_xml
from execdesc.description import CommandTemplate

OUTPUT_NAME = "execution-description.rdf"

_NAMESPACES = (
    ("", ns.ED),
    ("rdf", ns.RDF),
    ("rdfs", ns.RDFS),
    ("cito", ns.CITO),
    ("wfdesc", ns.WFDESC),
)


class _Step:
    def __init__(self, name: str, command: str, label: str):
        self.name = name
        self.command = command
        self.label = label
        self.depends_on: list[str] = []
        # placeholder name -> (minimum, maximum) | tuple of allowed values | None
        self.bounds: dict = {}


def _sanitize(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "-", name)


def _prompt(text: str) -> str:
    return click.prompt(text, default="", show_default=False).strip()


def _collect_steps() -> list[_Step]:
    click.echo("Commands that reproduce this work, one at a time (empty to finish).")
    steps: list[_Step] = []
    taken: set[str] = set()
    while True:
        command = _prompt("command")
        if not command:
            if steps:
                return steps
            click.echo("at least one command is needed", err=True)
            continue
        default_name = f"step-{len(steps) + 1}"
        name = _sanitize(
            click.prompt("short name", default=default_name).strip() or default_name
        )
        while name in taken:
            name += "-2"
        taken.add(name)
        label = _prompt("what does it do")
        steps.append(_Step(name, command, label))


def _collect_dependencies(steps: list[_Step]):
    if len(steps) < 2:
        return
    click.echo("Order constraints: which earlier steps must finish first?")
    names = [s.name for s in steps]
    for i, step in enumerate(steps[1:], start=1):
        earlier = names[:i]
        raw = _prompt(f"{step.name} depends on ({', '.join(earlier)}; comma-separated, empty for none)")
        for token in raw.split(","):
            token = token.strip()
            if not token:
                continue
            if token not in earlier or token in step.depends_on:
                click.echo(f"ignoring {token!r}", err=True)
                continue
            step.depends_on.append(token)


def _collect_document() -> str:
    doi = _prompt("publication DOI or URL this work is part of (empty to skip)")
    if not doi:
        return ""
    if doi.startswith(("http://", "https://")):
        return doi
    return "https://doi.org/" + doi.lstrip("/")


def _parse_bounds(raw: str):
    """MIN..MAX makes a numeric range, A|B|C an enumeration, empty no bounds."""
    if not raw:
        return None
    if "|" in raw:
        values = tuple(v.strip() for v in raw.split("|") if v.strip())
        return values or None
    if ".." in raw:
        low, _, high = raw.partition("..")
        try:
            minimum, maximum = float(low), float(high)
        except ValueError:
            return ValueError(f"{raw!r} is not MIN..MAX with numeric bounds")
        if minimum > maximum:
            return ValueError(f"{raw!r} has its bounds reversed")
        return (minimum, maximum)
    return ValueError(f"{raw!r} is neither MIN..MAX nor A|B|C")


def _collect_parameters(steps: list[_Step]):
    for step in steps:
        for name in CommandTemplate(step.command).placeholders:
            while True:
                raw = _prompt(f"bounds for ${{{name}}} of {step.name} (MIN..MAX, A|B|C, or empty)")
                bounds = _parse_bounds(raw)
                if isinstance(bounds, ValueError):
                    click.echo(str(bounds), err=True)
                    continue
                step.bounds[name] = bounds
                break


def _format_number(value: float) -> str:
    return f"{value:g}"


def _build_graph(base: Iri, steps: list[_Step], document: str):
    builder = GraphBuilder(base)
    for prefix, uri in _NAMESPACES:
        builder.set_namespace(prefix, uri)
    for step in steps:
        iri = resolve_reference(base, f"#{step.name}")
        builder.add(iri, ns.RDF_TYPE, ns.ED_PROCESS)
        builder.add(iri, ns.ED_COMMAND, Literal(step.command))
        if step.label:
            builder.add(iri, ns.ED_PURPOSE, Literal(step.label))
        if document:
            evidence = builder.bnode()
            builder.add(iri, ns.ED_PURPOSE, evidence)
            builder.add(evidence, ns.CITO_CITED_AS_EVIDENCE_BY, Iri(document))
        for dep in step.depends_on:
            builder.add(iri, ns.ED_DEPENDS_ON, resolve_reference(base, f"#{dep}"))
        for name, bounds in step.bounds.items():
            parameter = builder.bnode()
            builder.add(iri, ns.WFDESC_PARAMETER, parameter)
            builder.add(parameter, ns.RDFS_LABEL, Literal(name))
            if isinstance(bounds, tuple) and bounds and isinstance(bounds[0], float):
                builder.add(parameter, ns.ED_MIN_VALUE, Literal(_format_number(bounds[0])))
                builder.add(parameter, ns.ED_MAX_VALUE, Literal(_format_number(bounds[1])))
            elif isinstance(bounds, tuple):
                for value in bounds:
                    builder.add(parameter, ns.ED_ALLOWED_VALUE, Literal(value))
    return builder.build()


def run_wizard(directory: Path) -> Path:
    """Prompt, then write the description; raises click.Abort on EOF or ^C."""
    directory = Path(directory)
    out_path = directory / OUTPUT_NAME
    if out_path.exists() and not click.confirm(f"{out_path} exists; overwrite?", default=False):
        raise click.Abort()

    steps = _collect_steps()
    _collect_dependencies(steps)
    document = _collect_document()
    _collect_parameters(steps)

    base = Iri(out_path.resolve().as_uri())
    payload = serialize_rdf_xml(_build_graph(base, steps, document), relativize=True)
    out_path.write_bytes(payload)
    return out_path
