"""Find a description for a repository, guessing from file layout if needed.

Resolution walks three tiers and stops at the first that produces anything:
a description file committed to the repository, a record in a configured
registry, and finally an ordered rule table that maps tell-tale files to a
conventional build command.  A description file that exists but cannot be
used is an error, never a silent fall-through: guessing over an author's
broken description would hide exactly the ambiguity this tool is for.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from execdesc import ns
from execdesc.description import ExecutionDescription, extract
from execdesc.errors import ExecdescError
from execdesc.rdf import GraphBuilder, Iri, Literal, load_rdf_xml, parse_rdf_xml, resolve_reference


class HeuristicError(ExecdescError):
    """The repository directory cannot be examined."""


class ResolutionError(ExecdescError):
    """Resolution failed in a way the user must deal with."""


class NoDescriptionError(ResolutionError):
    """Every tier came up empty."""


class InvalidDescriptionError(ResolutionError):
    """A description was found but is unusable; surfaced, not skipped."""


@dataclass(frozen=True)
class HeuristicRule:
    """One file-presence rule: if ``trigger`` matches, ``command`` runs it."""

    name: str
    trigger: str  # exact filename or glob, relative to the repository root
    command: str


@dataclass(frozen=True)
class RuleTable:
    """Ordered rules, evaluated first-match-wins."""

    rules: tuple[HeuristicRule, ...]

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError("duplicate rule names: " + ", ".join(dupes))

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


DEFAULT_RULES = RuleTable(
    (
        HeuristicRule("makefile", "Makefile", "make all"),
        HeuristicRule("snakefile", "Snakefile", "snakemake --cores 1 --use-conda=false"),
        HeuristicRule("docker-compose", "docker-compose.yml", "docker compose up --build"),
        HeuristicRule("run-sh", "run.sh", "sh ./run.sh"),
    )
)

# Conventional locations for a committed description, checked in order.
DESCRIPTION_FILENAMES = (
    "execution-description.rdf",
    "execution-description.xml",
    ".reproduce/execution-description.rdf",
)

GUESSED_PROCESS_FRAGMENT = "#guessed-main"


@dataclass(frozen=True)
class ResolutionSource:
    """Which tier produced the description, with the identifying detail."""

    tier: str  # repository-description | library-record | heuristic
    detail: str  # file path, record id, or rule name

    def __str__(self) -> str:
        if self.tier == "heuristic":
            return f"heuristic({self.detail})"
        return self.tier


@dataclass(frozen=True)
class ResolutionOutcome:
    source: ResolutionSource
    description: ExecutionDescription


def _require_directory(repo_dir: Path) -> Path:
    repo_dir = Path(repo_dir)
    if not repo_dir.is_dir():
        raise HeuristicError(f"{repo_dir} is not a readable directory")
    return repo_dir


def _trigger_matches(repo_dir: Path, trigger: str) -> bool:
    try:
        if any(ch in trigger for ch in "*?["):
            return any(p.is_file() for p in repo_dir.glob(trigger))
        return (repo_dir / trigger).is_file()
    except OSError as exc:
        raise HeuristicError(f"cannot examine {repo_dir}: {exc}") from exc


def synthesize_description(rule: HeuristicRule, repo_dir: Path) -> ExecutionDescription:
    """One-process description carrying the rule's command and a label naming it."""
    repo_dir = Path(repo_dir)
    base = Iri(repo_dir.resolve().as_uri() + "/")
    builder = GraphBuilder(base)
    builder.set_namespace("", ns.ED)
    builder.set_namespace("rdf", ns.RDF)
    process = resolve_reference(base, GUESSED_PROCESS_FRAGMENT)
    builder.add(process, ns.RDF_TYPE, ns.ED_PROCESS)
    builder.add(process, ns.ED_COMMAND, Literal(rule.command))
    builder.add(process, ns.ED_PURPOSE, Literal(f"guessed by heuristic: {rule.name}"))
    return extract(builder.build())


def guess(
    repo_dir: Path, table: RuleTable = DEFAULT_RULES
) -> Optional[tuple[HeuristicRule, ExecutionDescription]]:
    """First matching rule with its synthesized description, or None."""
    repo_dir = _require_directory(repo_dir)
    for rule in table:
        if _trigger_matches(repo_dir, rule.trigger):
            return rule, synthesize_description(rule, repo_dir)
    return None


def repo_url_from_git(repo_dir: Path) -> Optional[str]:
    """The origin remote of the checkout, when version control knows one."""
    try:
        proc = subprocess.run(
            ["git", "-C", str(repo_dir), "config", "--get", "remote.origin.url"],
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.TimeoutExpired):
        return None
    url = proc.stdout.strip()
    return url if proc.returncode == 0 and url else None


def _load_repository_description(path: Path) -> ExecutionDescription:
    try:
        graph = load_rdf_xml(path)
    except ExecdescError as exc:
        raise InvalidDescriptionError(f"description at {path} does not parse: {exc}") from exc
    description = extract(graph)
    if not description.processes:
        raise InvalidDescriptionError(f"description at {path} contains no processes")
    return description


def _load_library_document(document: bytes, repo: str, record_id: str) -> ExecutionDescription:
    from execdesc.library.client import document_base

    try:
        graph = parse_rdf_xml(document, document_base(repo))
    except ExecdescError as exc:
        raise InvalidDescriptionError(
            f"library record {record_id} does not parse: {exc}"
        ) from exc
    description = extract(graph)
    if not description.processes:
        raise InvalidDescriptionError(f"library record {record_id} contains no processes")
    return description


def resolve(
    repo_dir: Path,
    library_endpoints: Iterable[str] = (),
    table: RuleTable = DEFAULT_RULES,
    repo_url: Optional[str] = None,
) -> ResolutionOutcome:
    """Walk the three tiers; exactly one contributes, named in the outcome."""
    from execdesc.library.client import fetch

    repo_dir = _require_directory(repo_dir)

    for name in DESCRIPTION_FILENAMES:
        path = repo_dir / name
        if path.is_file():
            description = _load_repository_description(path)
            return ResolutionOutcome(
                ResolutionSource("repository-description", str(path)), description
            )

    endpoints = tuple(library_endpoints)
    if endpoints:
        url = repo_url or repo_url_from_git(repo_dir)
        if url is None:
            raise ResolutionError(
                "library lookup needs the repository URL, and the checkout has no "
                "origin remote; pass it explicitly"
            )
        for endpoint in endpoints:
            records = fetch(endpoint, url)
            if records:
                record = records[0]  # newest first
                description = _load_library_document(record.document, record.repo, record.id)
                return ResolutionOutcome(
                    ResolutionSource("library-record", record.id), description
                )

    guessed = guess(repo_dir, table)
    if guessed is not None:
        rule, description = guessed
        return ResolutionOutcome(ResolutionSource("heuristic", rule.name), description)

    raise NoDescriptionError(f"no description resolvable for {repo_dir}")
