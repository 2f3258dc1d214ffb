"""Sentence splitting and the native/remote provider implementations."""

import json
import socket
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from articlegen.errors import DataError, ProviderError
from articlegen.providers import (
    NativeSummarizer,
    RemoteEmbedder,
    RemoteSummarizer,
    Summarizer,
    split_sentences,
)


@contextmanager
def http_stub(reply):
    """Local server answering every POST with reply(payload) -> (status, bytes)."""

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length) or b"{}")
            status, body = reply(payload)
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}/"
    finally:
        server.shutdown()
        thread.join()
        server.server_close()


def closed_port_endpoint() -> str:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
    return f"http://127.0.0.1:{port}/"


class TestSplitSentences:
    def test_terminators(self):
        assert split_sentences("One. Two! Three? Four") == [
            "One.",
            "Two!",
            "Three?",
            "Four",
        ]

    def test_abbreviation_splits_anyway(self):
        # known coarseness of the whitespace-after-terminator rule
        assert split_sentences("Dr. Smith arrived. He left.") == [
            "Dr.",
            "Smith arrived.",
            "He left.",
        ]

    def test_no_whitespace_no_split(self):
        assert split_sentences("a.b") == ["a.b"]

    def test_newline_counts_as_whitespace(self):
        assert split_sentences("First.\nSecond.") == ["First.", "Second."]

    def test_empty_and_blank(self):
        assert split_sentences("") == []
        assert split_sentences("   ") == []


class TestNativeSummarizer:
    def test_keeps_leading_sentences(self):
        native = NativeSummarizer()
        text = "Alpha one. Beta two. Gamma three."
        assert native.summarize(text, 2) == "Alpha one. Beta two."

    def test_short_text_kept_whole(self):
        assert NativeSummarizer().summarize("Only one.", 5) == "Only one."

    def test_rejects_non_positive_budget(self):
        with pytest.raises(DataError, match="max_sentences"):
            NativeSummarizer().summarize("Text.", 0)

    def test_interface(self):
        native = NativeSummarizer()
        assert isinstance(native, Summarizer)
        assert native.tag == "native-extractive"
        assert native.abstractive is False


class TestRemoteSummarizer:
    def test_success_and_request_shape(self):
        seen = []

        def reply(payload):
            seen.append(payload)
            return 200, json.dumps({"summary": "Short answer."}).encode()

        with http_stub(reply) as endpoint:
            out = RemoteSummarizer(endpoint).summarize("Long text here.", 3)
        assert out == "Short answer."
        assert seen == [{"text": "Long text here.", "max_sentences": 3}]

    def test_interface(self):
        remote = RemoteSummarizer("http://127.0.0.1:1/")
        assert isinstance(remote, Summarizer)
        assert remote.abstractive is True

    def test_rejects_non_positive_budget_before_any_request(self):
        with pytest.raises(DataError, match="max_sentences"):
            RemoteSummarizer(closed_port_endpoint()).summarize("Text.", 0)

    def test_http_error(self):
        with http_stub(lambda payload: (500, b"boom")) as endpoint:
            with pytest.raises(ProviderError, match="summarizer at"):
                RemoteSummarizer(endpoint).summarize("Text.", 1)

    def test_non_json_body(self):
        with http_stub(lambda payload: (200, b"not json at all")) as endpoint:
            with pytest.raises(ProviderError, match="summarizer at"):
                RemoteSummarizer(endpoint).summarize("Text.", 1)

    def test_missing_summary_key(self):
        with http_stub(lambda payload: (200, b'{"other": 1}')) as endpoint:
            with pytest.raises(ProviderError, match="missing non-empty 'summary'"):
                RemoteSummarizer(endpoint).summarize("Text.", 1)

    def test_blank_summary_rejected(self):
        with http_stub(lambda payload: (200, b'{"summary": "  "}')) as endpoint:
            with pytest.raises(ProviderError, match="missing non-empty 'summary'"):
                RemoteSummarizer(endpoint).summarize("Text.", 1)

    def test_unreachable_endpoint(self):
        with pytest.raises(ProviderError, match="summarizer at"):
            RemoteSummarizer(closed_port_endpoint(), timeout=2.0).summarize("Text.", 1)


class TestRemoteEmbedder:
    def test_success(self):
        def reply(payload):
            assert payload == {"texts": ["a", "b"]}
            return 200, json.dumps({"vectors": [[1, 2], [3, 4]]}).encode()

        with http_stub(reply) as endpoint:
            vectors = RemoteEmbedder(endpoint).embed(["a", "b"])
        assert vectors == [[1.0, 2.0], [3.0, 4.0]]

    def test_empty_input_short_circuits(self):
        calls = []

        def reply(payload):
            calls.append(payload)
            return 200, b'{"vectors": []}'

        with http_stub(reply) as endpoint:
            assert RemoteEmbedder(endpoint).embed([]) == []
        assert calls == []

    def test_wrong_vector_count(self):
        with http_stub(lambda payload: (200, b'{"vectors": [[1.0]]}')) as endpoint:
            with pytest.raises(ProviderError, match="expected 2 vectors"):
                RemoteEmbedder(endpoint).embed(["a", "b"])

    def test_inconsistent_dimensions(self):
        body = b'{"vectors": [[1.0, 2.0], [3.0]]}'
        with http_stub(lambda payload: (200, body)) as endpoint:
            with pytest.raises(ProviderError, match="inconsistent vector dimensions"):
                RemoteEmbedder(endpoint).embed(["a", "b"])

    def test_non_object_payload(self):
        with http_stub(lambda payload: (200, b"[1, 2]")) as endpoint:
            with pytest.raises(ProviderError, match="expected 1 vectors"):
                RemoteEmbedder(endpoint).embed(["a"])

    def test_http_error(self):
        with http_stub(lambda payload: (500, b"boom")) as endpoint:
            with pytest.raises(ProviderError, match="embedder at"):
                RemoteEmbedder(endpoint).embed(["a"])
