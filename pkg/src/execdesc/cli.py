"""Command line entry points.

Exit codes are a contract: 0 success, 1 a step failed, 2 the input or
invocation is invalid, 3 nothing matched or nothing was resolvable, 4 the
user aborted an interactive session.  Human-readable results go to stdout;
diagnostics and errors go to stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from execdesc.config import ConfigError, load_config
from execdesc.description import ExecutionDescription, extract, validate
from execdesc.errors import ExecdescError
from execdesc.executor import (
    BindingError,
    ExecutionReport,
    ExecutorError,
    RunOptions,
    execute_plan,
)
from execdesc.heuristics import (
    NoDescriptionError,
    guess as guess_repository,
    repo_url_from_git,
    resolve as resolve_repository,
)
from execdesc.library.client import LibraryError, fetch as fetch_records, publish as publish_document
from execdesc.library.server import LibraryServer
from execdesc.planner import PlanError, build_plan
from execdesc.purpose import (
    ByClaim,
    ByDocument,
    ByFigure,
    ByLabel,
    EvidenceFor,
    GeneratesFigure,
    Label,
    RemoteClaim,
    SupportsClaim,
    select_processes,
)
from execdesc.rdf import Iri, load_rdf_xml, resolve_reference, serialize_rdf_xml

EXIT_OK = 0
EXIT_STEP_FAILED = 1
EXIT_INVALID = 2
EXIT_NOTHING_FOUND = 3
EXIT_ABORTED = 4

_DESCRIPTION_ARG = click.Path(exists=True, dir_okay=False, path_type=Path)
_DIRECTORY_ARG = click.Path(exists=True, file_okay=False, path_type=Path)


def _die(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_description(path: Path) -> ExecutionDescription:
    try:
        return extract(load_rdf_xml(path))
    except ExecdescError as exc:
        _die(EXIT_INVALID, str(exc))


def _display_name(iri: Iri, base: Iri) -> str:
    text = str(iri)
    if "#" in text:
        return "#" + text.rsplit("#", 1)[1]
    if text.startswith(str(base).rsplit("/", 1)[0] + "/"):
        return text.rsplit("/", 1)[1]
    return text


def _purpose_text(purpose) -> str:
    if isinstance(purpose, Label):
        return f'"{purpose.text}"'
    if isinstance(purpose, EvidenceFor):
        return f"evidence for <{purpose.document}>"
    if isinstance(purpose, GeneratesFigure):
        parts = ["generates figure"]
        if purpose.title:
            parts.append(f'"{purpose.title}"')
        if purpose.part_of:
            parts.append(f"in <{purpose.part_of}>")
        return " ".join(parts)
    if isinstance(purpose, SupportsClaim):
        target = purpose.target
        if isinstance(target, RemoteClaim):
            return f"supports claim <{target.claim}>"
        return f"supports claim <{target.subject}> <{target.predicate}> <{target.object}>"
    return repr(purpose)


def _selection_options(with_target: bool):
    def wrap(f):
        options = [
            click.option(
                "--purpose",
                metavar="TEXT",
                help="Select processes whose label equals TEXT exactly.",
            ),
            click.option(
                "--purpose-contains",
                metavar="TEXT",
                help="Select processes whose label contains TEXT (case-insensitive).",
            ),
            click.option(
                "--document",
                metavar="IRI",
                help="Select processes whose purposes reference this publication.",
            ),
            click.option(
                "--figure",
                metavar="DOC[,TITLE]",
                help="Select processes generating a figure of DOC, optionally titled TITLE.",
            ),
            click.option(
                "--claim",
                metavar="IRI",
                help="Select processes supporting the claim at IRI.",
            ),
        ]
        if with_target:
            options.insert(
                0,
                click.option(
                    "--target",
                    "targets",
                    metavar="IRI",
                    multiple=True,
                    help="Run this process (repeatable; #fragment is resolved "
                    "against the description).",
                ),
            )
        for option in reversed(options):
            f = option(f)
        return f

    return wrap


def _build_query(purpose, purpose_contains, document, figure, claim):
    given = [v for v in (purpose, purpose_contains, document, figure, claim) if v]
    if len(given) > 1:
        raise click.UsageError("choose at most one selection flag")
    if purpose:
        return ByLabel(purpose, "exact")
    if purpose_contains:
        return ByLabel(purpose_contains, "substring")
    if document:
        return ByDocument(Iri(document))
    if figure:
        doc, sep, title = figure.partition(",")
        return ByFigure(Iri(doc.strip()), title.strip() if sep else None)
    if claim:
        return ByClaim(RemoteClaim(Iri(claim)))
    return None


def _select_targets(description, targets, query) -> list[Iri]:
    if targets and query is not None:
        raise click.UsageError("--target cannot be combined with a selection flag")
    if targets:
        return [resolve_reference(description.base, t) for t in targets]
    if query is not None:
        selected = select_processes(description, query)
        if not selected:
            _die(EXIT_NOTHING_FOUND, "no processes match the selection")
        return selected
    if not description.processes:
        _die(EXIT_NOTHING_FOUND, "the description declares no processes")
    return sorted(description.processes)


def _parse_bindings(params: tuple[str, ...]) -> dict:
    bindings = {}
    for item in params:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise click.UsageError(f"--param needs NAME=VALUE, got {item!r}")
        bindings[name] = value
    return bindings


def _run_flags(f):
    options = [
        click.option("--param", "params", metavar="NAME=VALUE", multiple=True,
                     help="Bind a command placeholder (repeatable)."),
        click.option("--dry-run", is_flag=True, help="Plan only; execute nothing."),
        click.option("--keep-going", is_flag=True,
                     help="After a failure, keep running independent steps."),
        click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True,
                     help="Maximum steps to run concurrently."),
        click.option("--strict", is_flag=True,
                     help="Reject parameter bindings nothing consumes."),
        click.option("--chdir", type=_DIRECTORY_ARG,
                     help="Working directory for the commands "
                     "(default: the description file's directory)."),
        click.option("--log-dir", type=click.Path(file_okay=False, path_type=Path),
                     help="Directory for per-step output logs."),
        click.option("--format", "output_format",
                     type=click.Choice(["text", "records"]), default="text",
                     show_default=True,
                     help="Per-step output style; records is JSON lines."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _execute(description, targets, query, params, dry_run, keep_going, jobs, strict,
             working_dir, log_dir, output_format):
    selected = _select_targets(description, targets, query)
    bindings = _parse_bindings(params)
    try:
        plan = build_plan(description, selected, bindings, strict=strict)
    except (BindingError, PlanError) as exc:
        _die(EXIT_INVALID, str(exc))
    options = RunOptions(
        working_dir=working_dir,
        log_dir=log_dir,
        dry_run=dry_run,
        keep_going=keep_going,
        max_parallel=jobs,
    )
    try:
        report = execute_plan(plan, options)
    except ExecutorError as exc:
        _die(EXIT_INVALID, str(exc))
    _print_report(report, output_format)
    sys.exit(EXIT_OK if report.overall in ("success", "dry_run") else EXIT_STEP_FAILED)


def _print_report(report: ExecutionReport, output_format: str):
    if output_format == "records":
        for record in report.to_records():
            click.echo(json.dumps(record, sort_keys=True))
    else:
        for line in report.summary_lines():
            click.echo(line)


@click.group("execdesc")
@click.version_option(package_name="execdesc")
def main():
    """Work with execution descriptions: machine-readable records of the
    commands that reproduce a computational experiment, why they run, and
    in what order."""


@main.command("validate")
@click.argument("file", type=_DESCRIPTION_ARG)
def cmd_validate(file: Path):
    """Check FILE and print its diagnostics."""
    description = _load_description(file)
    diagnostics = validate(description)
    for diagnostic in diagnostics:
        click.echo(str(diagnostic), err=True)
    if not description.processes:
        click.echo("warning: no processes found", err=True)
    errors = sum(1 for d in diagnostics if d.severity == "error")
    warnings = sum(1 for d in diagnostics if d.severity == "warning")
    click.echo(f"{file}: {errors} error(s), {warnings} warning(s)")
    sys.exit(EXIT_INVALID if errors else EXIT_OK)


@main.command("list")
@click.argument("file", type=_DESCRIPTION_ARG)
@_selection_options(with_target=False)
def cmd_list(file: Path, purpose, purpose_contains, document, figure, claim):
    """List the processes FILE declares, one row each."""
    description = _load_description(file)
    query = _build_query(purpose, purpose_contains, document, figure, claim)
    if query is None:
        selected = sorted(description.processes)
    else:
        selected = select_processes(description, query)
    rows = []
    for iri in selected:
        descriptor = description.processes[iri]
        rows.append(
            (
                _display_name(iri, description.base),
                descriptor.command.raw,
                ", ".join(
                    _display_name(d, description.base) for d in descriptor.depends_on
                ),
                "; ".join(_purpose_text(p) for p in descriptor.purposes),
            )
        )
    if rows:
        headers = ("PROCESS", "COMMAND", "DEPENDS ON", "PURPOSES")
        widths = [
            max(len(headers[i]), *(len(row[i]) for row in rows)) for i in range(3)
        ]
        click.echo(
            "  ".join(headers[i].ljust(widths[i]) for i in range(3)) + "  " + headers[3]
        )
        for row in rows:
            click.echo(
                "  ".join(row[i].ljust(widths[i]) for i in range(3)) + "  " + row[3]
            )
    sys.exit(EXIT_OK)


@main.command("run")
@click.argument("file", type=_DESCRIPTION_ARG)
@_selection_options(with_target=True)
@_run_flags
def cmd_run(file: Path, targets, purpose, purpose_contains, document, figure, claim,
            params, dry_run, keep_going, jobs, strict, chdir, log_dir, output_format):
    """Plan and execute processes from FILE."""
    description = _load_description(file)
    query = _build_query(purpose, purpose_contains, document, figure, claim)
    working_dir = chdir if chdir is not None else file.resolve().parent
    _execute(description, targets, query, params, dry_run, keep_going, jobs, strict,
             working_dir, log_dir, output_format)


@main.command("guess")
@click.argument("directory", type=_DIRECTORY_ARG)
@click.option("--run", "run_it", is_flag=True, help="Execute the guessed command.")
@click.option("--publish", "endpoint", metavar="ENDPOINT",
              help="After a successful --run, upload the description here.")
@click.option("--repo-url", metavar="URL",
              help="Repository URL for --publish (default: the origin remote).")
@click.option("--config", "config_path", type=_DESCRIPTION_ARG,
              help="Configuration file with a custom rule table.")
def cmd_guess(directory: Path, run_it, endpoint, repo_url, config_path):
    """Guess how to run the repository in DIRECTORY from its file layout."""
    if endpoint and not run_it:
        raise click.UsageError("--publish requires --run: only a command that "
                              "worked is worth sharing")
    try:
        table = load_config(config_path).rule_table
        guessed = guess_repository(directory, table)
    except ExecdescError as exc:
        _die(EXIT_INVALID, str(exc))
    if guessed is None:
        _die(EXIT_NOTHING_FOUND, f"no heuristic rule matches {directory}")
    rule, description = guessed
    payload = serialize_rdf_xml(description.source_graph, relativize=True)
    click.echo(f"rule: {rule.name}", err=True)
    click.echo(payload.decode("utf-8"), nl=False)
    if not run_it:
        sys.exit(EXIT_OK)

    plan = build_plan(description, sorted(description.processes))
    try:
        report = execute_plan(plan, RunOptions(working_dir=directory))
    except ExecutorError as exc:
        _die(EXIT_INVALID, str(exc))
    _print_report(report, "text")
    if report.overall != "success":
        sys.exit(EXIT_STEP_FAILED)
    if endpoint:
        url = repo_url or repo_url_from_git(directory)
        if url is None:
            _die(EXIT_INVALID, "publishing needs the repository URL, and the "
                 "checkout has no origin remote; pass --repo-url")
        try:
            record = publish_document(endpoint, url, payload, provenance="heuristic-derived")
        except LibraryError as exc:
            _die(EXIT_INVALID, str(exc))
        click.echo(f"published record {record.id}")
    sys.exit(EXIT_OK)


@main.command("resolve")
@click.argument("directory", type=_DIRECTORY_ARG)
@click.option("--repo-url", metavar="URL",
              help="Repository URL for registry lookups (default: the origin remote).")
@click.option("--library", "libraries", metavar="ENDPOINT", multiple=True,
              help="Registry endpoint to consult (repeatable; overrides configuration).")
@click.option("--config", "config_path", type=_DESCRIPTION_ARG,
              help="Configuration file with endpoints and rules.")
@_selection_options(with_target=True)
@_run_flags
def cmd_resolve(directory: Path, repo_url, libraries, config_path,
                targets, purpose, purpose_contains, document, figure, claim,
                params, dry_run, keep_going, jobs, strict, chdir, log_dir, output_format):
    """Find the description for DIRECTORY (committed file, then registry,
    then heuristic) and run it."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        _die(EXIT_INVALID, str(exc))
    endpoints = libraries if libraries else config.libraries
    try:
        outcome = resolve_repository(directory, endpoints, config.rule_table, repo_url)
    except NoDescriptionError as exc:
        _die(EXIT_NOTHING_FOUND, str(exc))
    except ExecdescError as exc:
        _die(EXIT_INVALID, str(exc))
    click.echo(f"resolved via {outcome.source}")
    query = _build_query(purpose, purpose_contains, document, figure, claim)
    working_dir = chdir if chdir is not None else directory
    _execute(outcome.description, targets, query, params, dry_run, keep_going, jobs,
             strict, working_dir, log_dir, output_format)


@main.command("init")
@click.argument("directory", type=_DIRECTORY_ARG, default=".")
def cmd_init(directory: Path):
    """Interactively write a description file into DIRECTORY."""
    from execdesc.wizard import run_wizard

    try:
        path = run_wizard(directory)
    except click.Abort:
        click.echo("aborted; nothing written", err=True)
        sys.exit(EXIT_ABORTED)
    except OSError as exc:
        _die(EXIT_INVALID, f"cannot write description: {exc}")
    click.echo(f"wrote {path}")
    sys.exit(EXIT_OK)


@main.command("fetch")
@click.argument("endpoint")
@click.argument("repo")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path),
              help="Write the document here instead of stdout.")
def cmd_fetch(endpoint: str, repo: str, output: Optional[Path]):
    """Fetch the newest description for REPO from the registry at ENDPOINT."""
    try:
        records = fetch_records(endpoint, repo)
    except LibraryError as exc:
        _die(EXIT_INVALID, str(exc))
    if not records:
        _die(EXIT_NOTHING_FOUND, f"no records for {repo}")
    newest = records[0]
    click.echo(f"record {newest.id} ({newest.provenance}, {newest.submitted_at})", err=True)
    if output is not None:
        output.write_bytes(newest.document)
        click.echo(f"wrote {output}")
    else:
        click.echo(newest.document.decode("utf-8"), nl=False)
    sys.exit(EXIT_OK)


@main.command("publish")
@click.argument("endpoint")
@click.argument("repo")
@click.argument("file", type=_DESCRIPTION_ARG)
@click.option("--provenance", type=click.Choice(["authored", "heuristic-derived"]),
              default="authored", show_default=True,
              help="How this description came to be.")
def cmd_publish(endpoint: str, repo: str, file: Path, provenance: str):
    """Upload the description FILE for REPO to the registry at ENDPOINT."""
    try:
        record = publish_document(endpoint, repo, file.read_bytes(), provenance)
    except LibraryError as exc:
        _die(EXIT_INVALID, str(exc))
    click.echo(f"published record {record.id}")
    sys.exit(EXIT_OK)


@main.command("serve")
@click.option("--store", type=click.Path(file_okay=False, path_type=Path), required=True,
              help="Directory holding the record log.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8642, show_default=True,
              help="Port to listen on (0 picks a free one).")
def cmd_serve(store: Path, host: str, port: int):
    """Run the reference registry server in the foreground."""
    try:
        server = LibraryServer(store, host, port)
    except LibraryError as exc:
        _die(EXIT_INVALID, str(exc))
    print(f"listening on {server.url}", flush=True)
    try:
        server.run()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    sys.exit(EXIT_OK)
