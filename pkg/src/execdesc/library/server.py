"""Reference registry server: a JSONL-backed store behind a small HTTP API.

Persistence is one JSON record per line, append-only.  The index is rebuilt
from the log at startup, so a restart loses nothing; a torn final line from
a crash mid-append is skipped.  Writes are serialized through a single lock
and fsynced before they are acknowledged; reads go against an immutable
snapshot that each write replaces wholesale, so they take no lock.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping, Optional
from urllib.parse import parse_qs, urlsplit

from execdesc.description import extract
from execdesc.errors import ExecdescError
from execdesc.library.client import (
    PROVENANCE_KINDS,
    LibraryError,
    content_hash_of,
    document_base,
    normalize_repo_url,
    record_id,
)
from execdesc.rdf import parse_rdf_xml

logger = logging.getLogger(__name__)

_RECORD_FIELDS = ("id", "repo", "document", "content_hash", "provenance", "submitted_at")


def _record_sort_key(record: Mapping):
    return (record["submitted_at"], _negate_str(record["id"]))


def _negate_str(s: str):
    # For one sorted() pass: newest submitted_at first, then id ascending.
    return tuple(-ord(c) for c in s)


class _Store:
    """records.jsonl plus an in-memory index; the log is the truth."""

    def __init__(self, store_dir: Path):
        store_dir = Path(store_dir)
        store_dir.mkdir(parents=True, exist_ok=True)
        self.path = store_dir / "records.jsonl"
        self._lock = threading.Lock()
        self._by_key: dict[tuple[str, str], dict] = {}
        self._snapshot: dict[str, tuple[dict, ...]] = {}
        self._load()

    def _load(self):
        if not self.path.exists():
            return
        grouped: dict[str, list[dict]] = {}
        for number, line in enumerate(self.path.read_bytes().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError:
                # A torn line can only come from a crash mid-append; the
                # record was never acknowledged, so dropping it is safe.
                logger.warning("%s: skipping undecodable line %d", self.path, number)
                continue
            if not all(field in record for field in _RECORD_FIELDS):
                logger.warning("%s: skipping incomplete record on line %d", self.path, number)
                continue
            key = (record["repo"], record["content_hash"])
            if key in self._by_key:
                continue
            self._by_key[key] = record
            grouped.setdefault(record["repo"], []).append(record)
        self._snapshot = {
            repo: tuple(sorted(records, key=_record_sort_key, reverse=True))
            for repo, records in grouped.items()
        }

    def lookup(self, repo: str) -> tuple[dict, ...]:
        return self._snapshot.get(repo, ())

    def add(self, repo: str, document: str, provenance: str) -> tuple[dict, bool]:
        digest = content_hash_of(document.encode("utf-8"))
        with self._lock:
            existing = self._by_key.get((repo, digest))
            if existing is not None:
                return existing, False
            record = {
                "id": record_id(repo, digest),
                "repo": repo,
                "document": document,
                "content_hash": digest,
                "provenance": provenance,
                "submitted_at": datetime.now(timezone.utc).isoformat(),
            }
            with open(self.path, "ab") as log:
                log.write(json.dumps(record, sort_keys=True).encode("utf-8") + b"\n")
                log.flush()
                os.fsync(log.fileno())
            self._by_key[(repo, digest)] = record
            per_repo = sorted(
                self._snapshot.get(repo, ()) + (record,), key=_record_sort_key, reverse=True
            )
            snapshot = dict(self._snapshot)
            snapshot[repo] = tuple(per_repo)
            self._snapshot = snapshot
        return record, True


class _Handler(BaseHTTPRequestHandler):
    server_version = "execdesc-library/0.1"

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        logger.debug("%s %s", self.address_string(), format % args)

    @property
    def store(self) -> _Store:
        return self.server.store

    def _send(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        url = urlsplit(self.path)
        if url.path == "/v1/health":
            self._send(200, {"status": "ok"})
            return
        if url.path == "/v1/descriptions":
            repos = parse_qs(url.query).get("repo")
            if not repos:
                self._send(400, {"error": "missing repo query parameter"})
                return
            key = normalize_repo_url(repos[0])
            records = self.store.lookup(key)
            if not records:
                self._send(404, {"error": f"no records for {key}"})
                return
            self._send(200, {"records": list(records)})
            return
        self._send(404, {"error": "unknown path"})

    def do_POST(self):
        if urlsplit(self.path).path != "/v1/descriptions":
            self._send(404, {"error": "unknown path"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length))
        except ValueError:
            self._send(400, {"error": "body is not valid JSON"})
            return
        if not isinstance(payload, dict):
            self._send(400, {"error": "body must be a JSON object"})
            return
        repo = payload.get("repo")
        document = payload.get("document")
        provenance = payload.get("provenance")
        if not isinstance(repo, str) or not isinstance(document, str):
            self._send(400, {"error": "repo and document must be strings"})
            return
        if provenance not in PROVENANCE_KINDS:
            self._send(
                400, {"error": f"provenance must be one of {', '.join(PROVENANCE_KINDS)}"}
            )
            return
        key = normalize_repo_url(repo)
        try:
            parse_rdf_xml(document.encode("utf-8"), document_base(key))
        except ExecdescError as exc:
            self._send(400, {"error": f"document does not parse: {exc}"})
            return
        record, created = self.store.add(key, document, provenance)
        self._send(201 if created else 200, record)


@dataclass(frozen=True)
class BindAddress:
    host: str = "127.0.0.1"
    port: int = 0


class LibraryServer:
    """A bound server; start() serves on a thread, run() serves in place."""

    def __init__(self, store_dir: Path, host: str = "127.0.0.1", port: int = 0):
        try:
            self._http = ThreadingHTTPServer((host, port), _Handler)
        except OSError as exc:
            raise LibraryError(f"cannot bind {host}:{port}: {exc}") from exc
        self._http.store = _Store(store_dir)
        self._thread: Optional[threading.Thread] = None

    @property
    def host(self) -> str:
        return self._http.server_address[0]

    @property
    def port(self) -> int:
        return self._http.server_address[1]

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> "LibraryServer":
        self._thread = threading.Thread(target=self._http.serve_forever, daemon=True)
        self._thread.start()
        return self

    def run(self):
        self._http.serve_forever()

    def stop(self):
        self._http.shutdown()
        self._http.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "LibraryServer":
        return self

    def __exit__(self, *exc_info):
        self.stop()


def serve(store_dir: Path, bind_address: BindAddress = BindAddress()) -> LibraryServer:
    """Bind, load the store, and serve on a background thread."""
    return LibraryServer(store_dir, bind_address.host, bind_address.port).start()
