"""Registry client and reference server.

The server under test is the real ThreadingHTTPServer on a loopback port;
only the restart-as-a-separate-process scenario lives elsewhere, with the
acceptance checks.
"""

import json
import threading
from pathlib import Path

import pytest
import requests
from hypothesis import given
from hypothesis import strategies as st

from execdesc.library import (
    LibraryError,
    LibraryServer,
    fetch,
    normalize_repo_url,
    publish,
    record_id,
    serve,
)
from execdesc.library.server import BindAddress

FIXTURE = Path(__file__).parent / "data" / "canonical-description.rdf"
REPO = "https://github.com/example/project"


@pytest.fixture()
def store(tmp_path):
    return tmp_path / "store"


@pytest.fixture()
def server(store):
    instance = LibraryServer(store).start()
    yield instance
    instance.stop()


class TestNormalization:
    def test_case_and_suffix_spellings_collapse(self):
        assert normalize_repo_url("HTTPS://GitHub.com/x/y.git/") == "https://github.com/x/y"

    def test_path_case_is_preserved(self):
        assert normalize_repo_url("https://github.com/X/Y") == "https://github.com/X/Y"

    def test_query_and_fragment_dropped(self):
        assert normalize_repo_url("https://h/x?tab=readme#top") == "https://h/x"

    def test_stacked_suffixes_all_stripped(self):
        assert normalize_repo_url("https://h/x.git.git//") == "https://h/x"

    def test_bare_host(self):
        assert normalize_repo_url("https://h/") == "https://h"

    @given(st.text(max_size=60))
    def test_idempotent_on_arbitrary_text(self, url):
        once = normalize_repo_url(url)
        assert normalize_repo_url(once) == once

    @given(
        st.builds(
            "{}://{}/{}{}".format,
            st.sampled_from(["http", "HTTPS", "ssh"]),
            st.text(st.characters(categories=("Lu", "Ll", "Nd")), min_size=1, max_size=12),
            st.text(st.sampled_from("abcXYZ019/._-"), max_size=20),
            st.sampled_from(["", "/", ".git", ".git/", "?q=1", "#frag"]),
        )
    )
    def test_idempotent_on_url_shapes(self, url):
        once = normalize_repo_url(url)
        assert normalize_repo_url(once) == once


class TestRecordId:
    def test_deterministic(self):
        assert record_id("r", "h") == record_id("r", "h")
        assert record_id("r", "h") != record_id("r", "h2")
        assert len(record_id("r", "h")) == 16


class TestClientGate:
    # The endpoint below is never listening; reaching it would turn these
    # gate errors into connection errors.
    DEAD = "http://127.0.0.1:9"

    def test_unparseable_document_fails_before_any_network(self):
        with pytest.raises(LibraryError, match="does not parse"):
            publish(self.DEAD, REPO, b"<rdf:RDF")

    def test_empty_document_fails_before_any_network(self):
        doc = (
            b'<?xml version="1.0"?>'
            b'<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"/>'
        )
        with pytest.raises(LibraryError, match="no processes"):
            publish(self.DEAD, REPO, doc)

    def test_unknown_provenance_rejected(self):
        with pytest.raises(LibraryError, match="provenance"):
            publish(self.DEAD, REPO, FIXTURE.read_bytes(), provenance="guessed")

    def test_non_utf8_rejected(self):
        with pytest.raises(LibraryError, match="UTF-8"):
            publish(self.DEAD, REPO, b"\xff\xfe<rdf:RDF/>")


class TestRoundTrip:
    def test_publish_then_fetch_returns_identical_bytes(self, server):
        document = FIXTURE.read_bytes()
        record = publish(server.url, REPO, document)
        [fetched] = fetch(server.url, REPO)
        assert fetched.document == document
        assert fetched.id == record.id
        assert fetched.content_hash == record.content_hash
        assert fetched.provenance == "authored"

    def test_fetch_unknown_repo_is_empty_not_an_error(self, server):
        assert fetch(server.url, "https://github.com/none/none") == []

    def test_repo_spellings_share_a_key(self, server):
        publish(server.url, "https://github.com/x/y.git", FIXTURE.read_bytes())
        assert len(fetch(server.url, "HTTPS://GitHub.com/x/y/")) == 1

    def test_duplicate_publish_is_idempotent(self, server):
        document = FIXTURE.read_bytes()
        first = publish(server.url, REPO, document)
        second = publish(server.url, REPO, document)
        assert first.id == second.id
        assert len(fetch(server.url, REPO)) == 1

    def test_different_documents_accumulate(self, server):
        document = FIXTURE.read_bytes()
        publish(server.url, REPO, document)
        publish(server.url, REPO, document.replace(b"make libs", b"make lib2"))
        assert len(fetch(server.url, REPO)) == 2

    def test_heuristic_provenance_recorded(self, server):
        record = publish(
            server.url, REPO, FIXTURE.read_bytes(), provenance="heuristic-derived"
        )
        assert record.provenance == "heuristic-derived"
        [fetched] = fetch(server.url, REPO)
        assert fetched.provenance == "heuristic-derived"

    def test_unreachable_endpoint_is_an_error(self):
        with pytest.raises(LibraryError, match="cannot reach"):
            fetch("http://127.0.0.1:9", REPO)


class TestOrdering:
    def test_newest_first_by_submitted_at_then_id(self, store):
        # Seed the log directly so the timestamps are controlled.
        store.mkdir(parents=True)
        rows = [
            {"id": "bbb", "repo": REPO, "document": "<d/>", "content_hash": "h1",
             "provenance": "authored", "submitted_at": "2026-01-01T00:00:00+00:00"},
            {"id": "aaa", "repo": REPO, "document": "<d/>", "content_hash": "h2",
             "provenance": "authored", "submitted_at": "2026-02-01T00:00:00+00:00"},
            {"id": "ccc", "repo": REPO, "document": "<d/>", "content_hash": "h3",
             "provenance": "authored", "submitted_at": "2026-01-01T00:00:00+00:00"},
        ]
        with open(store / "records.jsonl", "w") as log:
            for row in rows:
                log.write(json.dumps(row) + "\n")
        with LibraryServer(store).start() as server:
            got = [r.id for r in fetch(server.url, REPO)]
        assert got == ["aaa", "bbb", "ccc"]


class TestPersistence:
    def test_restart_returns_acknowledged_records(self, store):
        document = FIXTURE.read_bytes()
        with LibraryServer(store).start() as first:
            record = publish(first.url, REPO, document)
        with LibraryServer(store).start() as second:
            [fetched] = fetch(second.url, REPO)
        assert fetched.id == record.id
        assert fetched.document == document

    def test_store_is_one_json_record_per_line(self, server, store):
        publish(server.url, REPO, FIXTURE.read_bytes())
        lines = (store / "records.jsonl").read_text().splitlines()
        assert len(lines) == 1
        parsed = json.loads(lines[0])
        assert parsed["repo"] == REPO

    def test_torn_final_line_is_tolerated(self, store):
        document = FIXTURE.read_bytes()
        with LibraryServer(store).start() as first:
            publish(first.url, REPO, document)
        with open(store / "records.jsonl", "ab") as log:
            log.write(b'{"id": "trunc')  # crash mid-append
        with LibraryServer(store).start() as second:
            records = fetch(second.url, REPO)
            assert len(records) == 1
            # And the store still accepts new writes afterwards.
            publish(second.url, REPO, document.replace(b"libs", b"more"))
            assert len(fetch(second.url, REPO)) == 2


class TestConcurrency:
    def test_concurrent_duplicate_posts_store_one_record(self, server, store):
        document = FIXTURE.read_bytes()
        errors = []
        barrier = threading.Barrier(8)

        def worker():
            try:
                barrier.wait()
                publish(server.url, REPO, document)
            except Exception as exc:  # noqa: BLE001 - collected for the assert
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        assert len((store / "records.jsonl").read_text().splitlines()) == 1
        assert len(fetch(server.url, REPO)) == 1


class TestWireProtocol:
    def test_health(self, server):
        response = requests.get(server.url + "/v1/health", timeout=5)
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_get_without_repo_param(self, server):
        response = requests.get(server.url + "/v1/descriptions", timeout=5)
        assert response.status_code == 400

    def test_get_unknown_repo_is_404(self, server):
        response = requests.get(
            server.url + "/v1/descriptions", params={"repo": "https://h/none"}, timeout=5
        )
        assert response.status_code == 404

    def test_unknown_path_is_404(self, server):
        assert requests.get(server.url + "/v1/nope", timeout=5).status_code == 404

    def test_post_unparseable_document_is_400(self, server):
        response = requests.post(
            server.url + "/v1/descriptions",
            json={"repo": REPO, "document": "<rdf:RDF", "provenance": "authored"},
            timeout=5,
        )
        assert response.status_code == 400
        assert "parse" in response.json()["error"]

    def test_post_bad_provenance_is_400(self, server):
        response = requests.post(
            server.url + "/v1/descriptions",
            json={"repo": REPO, "document": "<x/>", "provenance": "nope"},
            timeout=5,
        )
        assert response.status_code == 400

    def test_post_non_json_body_is_400(self, server):
        response = requests.post(
            server.url + "/v1/descriptions", data=b"not json", timeout=5
        )
        assert response.status_code == 400

    def test_post_returns_201_then_200(self, server):
        body = {
            "repo": REPO,
            "document": FIXTURE.read_text(),
            "provenance": "authored",
        }
        first = requests.post(server.url + "/v1/descriptions", json=body, timeout=5)
        second = requests.post(server.url + "/v1/descriptions", json=body, timeout=5)
        assert first.status_code == 201
        assert second.status_code == 200
        assert first.json()["id"] == second.json()["id"]

    def test_get_payload_shape(self, server):
        publish(server.url, REPO, FIXTURE.read_bytes())
        payload = requests.get(
            server.url + "/v1/descriptions", params={"repo": REPO}, timeout=5
        ).json()
        [record] = payload["records"]
        assert set(record) == {
            "id", "repo", "document", "content_hash", "provenance", "submitted_at"
        }


class TestServe:
    def test_serve_returns_a_running_service(self, store):
        instance = serve(store, BindAddress("127.0.0.1", 0))
        try:
            assert instance.port > 0
            assert requests.get(instance.url + "/v1/health", timeout=5).ok
        finally:
            instance.stop()

    def test_bind_failure_is_a_startup_error(self, store, tmp_path):
        with LibraryServer(store).start() as holder:
            with pytest.raises(LibraryError, match="bind"):
                LibraryServer(tmp_path / "other", port=holder.port)
