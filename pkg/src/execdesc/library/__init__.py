"""Community registry of execution descriptions: client and reference server."""

from execdesc.library.client import (
    PROVENANCE_KINDS,
    LibraryError,
    LibraryRecord,
    content_hash_of,
    document_base,
    fetch,
    normalize_repo_url,
    publish,
    record_id,
)
from execdesc.library.server import BindAddress, LibraryServer, serve

__all__ = [
    "BindAddress",
    "LibraryError",
    "LibraryRecord",
    "LibraryServer",
    "PROVENANCE_KINDS",
    "content_hash_of",
    "document_base",
    "fetch",
    "normalize_repo_url",
    "publish",
    "record_id",
    "serve",
]
