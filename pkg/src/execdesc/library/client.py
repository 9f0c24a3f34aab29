"""HTTP client for the description registry.

Records are keyed by a normalized repository URL so that the many spellings
of one repository (trailing slash, ``.git`` suffix, mixed-case host) land on
the same entry.  Publishing is gated client-side: a document that does not
parse, or that declares no process at all, is rejected before any network
traffic happens.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping
from urllib.parse import urlsplit, urlunsplit

import requests

from execdesc.description import extract
from execdesc.errors import ExecdescError
from execdesc.rdf import Iri, parse_rdf_xml

PROVENANCE_KINDS = ("authored", "heuristic-derived")

_TIMEOUT = 10.0


class LibraryError(ExecdescError):
    """A registry interaction failed or was refused."""


def normalize_repo_url(url: str) -> str:
    """Canonical form of a repository URL: one spelling per repository.

    Lowercases scheme and host, drops query and fragment, and strips any
    pile-up of trailing slashes and ``.git`` suffixes from the path until
    neither remains, so normalizing twice changes nothing.
    """
    parts = urlsplit(url.strip())
    path = parts.path
    while True:
        if path.endswith("/"):
            path = path.rstrip("/")
        elif path.endswith(".git"):
            path = path[: -len(".git")]
        else:
            break
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), path, "", ""))


def record_id(repo: str, content_hash: str) -> str:
    """Deterministic id, so a republished document lands on the same record."""
    return hashlib.sha256(f"{repo}\n{content_hash}".encode()).hexdigest()[:16]


def content_hash_of(document: bytes) -> str:
    return hashlib.sha256(document).hexdigest()


def document_base(repo: str) -> Iri:
    """Base against which a stored document's relative references resolve.

    Registry documents travel without their original file location, so the
    convention is the repository URL itself; a key that is not an absolute
    IRI gets a synthetic one.
    """
    key = normalize_repo_url(repo)
    if urlsplit(key).scheme:
        return Iri(key + "/execution-description.rdf")
    return Iri("urn:execdesc:library:document")


@dataclass(frozen=True)
class LibraryRecord:
    id: str
    repo: str
    document: bytes
    content_hash: str
    provenance: str
    submitted_at: str  # ISO-8601 UTC

    @classmethod
    def from_wire(cls, payload: Mapping) -> "LibraryRecord":
        try:
            return cls(
                id=payload["id"],
                repo=payload["repo"],
                document=payload["document"].encode("utf-8"),
                content_hash=payload["content_hash"],
                provenance=payload["provenance"],
                submitted_at=payload["submitted_at"],
            )
        except (KeyError, AttributeError) as exc:
            raise LibraryError(f"malformed record in response: {exc!r}") from exc


def _newest_first(records: list[LibraryRecord]) -> list[LibraryRecord]:
    return sorted(sorted(records, key=lambda r: r.id), key=lambda r: r.submitted_at, reverse=True)


def fetch(endpoint: str, repo: str) -> list[LibraryRecord]:
    """All records for the repository, newest first; [] when none exist."""
    key = normalize_repo_url(repo)
    url = endpoint.rstrip("/") + "/v1/descriptions"
    try:
        response = requests.get(url, params={"repo": key}, timeout=_TIMEOUT)
    except requests.RequestException as exc:
        raise LibraryError(f"cannot reach library {endpoint}: {exc}") from exc
    if response.status_code == 404:
        return []
    if not response.ok:
        raise LibraryError(
            f"library {endpoint} answered {response.status_code}: {response.text[:200]}"
        )
    try:
        payload = response.json()
        records = [LibraryRecord.from_wire(r) for r in payload["records"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise LibraryError(f"library {endpoint} sent a malformed response: {exc!r}") from exc
    return _newest_first(records)


def publish(
    endpoint: str, repo: str, document: bytes, provenance: str = "authored"
) -> LibraryRecord:
    """Upload a description; idempotent per (repository, document bytes)."""
    if provenance not in PROVENANCE_KINDS:
        raise LibraryError(
            f"provenance must be one of {', '.join(PROVENANCE_KINDS)}; got {provenance!r}"
        )
    key = normalize_repo_url(repo)
    try:
        text = document.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LibraryError(f"refusing to publish: document is not UTF-8: {exc}") from exc
    try:
        graph = parse_rdf_xml(document, document_base(key))
    except ExecdescError as exc:
        raise LibraryError(f"refusing to publish: document does not parse: {exc}") from exc
    if not extract(graph).processes:
        raise LibraryError("refusing to publish: document declares no processes")

    url = endpoint.rstrip("/") + "/v1/descriptions"
    try:
        response = requests.post(
            url,
            json={"repo": key, "document": text, "provenance": provenance},
            timeout=_TIMEOUT,
        )
    except requests.RequestException as exc:
        raise LibraryError(f"cannot reach library {endpoint}: {exc}") from exc
    if response.status_code not in (200, 201):
        raise LibraryError(
            f"library {endpoint} rejected the document ({response.status_code}): "
            f"{response.text[:200]}"
        )
    try:
        return LibraryRecord.from_wire(response.json())
    except ValueError as exc:
        raise LibraryError(f"library {endpoint} sent a malformed response: {exc!r}") from exc
