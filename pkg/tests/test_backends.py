"""Backend behavior: scripted mock determinism and the generic HTTP client."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from ltlkit.backends import (
    AuthError,
    BackendError,
    CompletionRequest,
    HttpBackendConfig,
    HttpCompletionBackend,
    MockBackend,
    MockRule,
    RateLimitError,
    mock_rules_from_json,
)
from ltlkit.prompts import compute_prompt, load_packaged_template

MINIMAL = load_packaged_template("minimal")


def prompt_for(nl: str, given=()) -> str:
    return compute_prompt(MINIMAL, nl, list(given))


def request_for(nl: str, runs: int = 3, given=()) -> CompletionRequest:
    return CompletionRequest(prompt=prompt_for(nl, given), runs=runs)


def test_mock_cycles_completions_per_run():
    backend = MockBackend(
        [MockRule("a holds until b holds", ("first", "second"))]
    )
    batch = backend.complete(request_for("a holds until b holds or always a holds", runs=3))
    assert batch.completions == ("first", "second", "first")
    assert batch.backend_id == "mock"


def test_mock_single_run():
    backend = MockBackend([MockRule("b holds", ("only",))])
    batch = backend.complete(request_for("b holds eventually.", runs=1))
    assert batch.completions == ("only",)


def test_mock_first_matching_rule_wins():
    backend = MockBackend(
        [
            MockRule('"a holds": "(a)"', ("with-given",)),
            MockRule("a holds", ("generic",)),
        ]
    )
    batch = backend.complete(
        request_for("a holds forever.", runs=1, given=[("a holds", "(a)")])
    )
    assert batch.completions == ("with-given",)
    batch = backend.complete(request_for("a holds forever.", runs=1))
    assert batch.completions == ("generic",)


def test_mock_matches_only_the_live_tail():
    # The few-shot examples also contain "request", but rules must key off
    # the final natural-language line, not the template examples.
    backend = MockBackend([MockRule("Every request is eventually", ("leak",))])
    with pytest.raises(BackendError):
        backend.complete(request_for("c holds.", runs=1))


def test_mock_truncates_at_stop_token():
    backend = MockBackend(
        [MockRule("c holds", ("text before\nFINISH\ntext after",))]
    )
    batch = backend.complete(request_for("c holds.", runs=2))
    for completion in batch.completions:
        assert "FINISH" not in completion
    assert batch.completions[0] == "text before\n"


def test_mock_is_deterministic():
    backend = MockBackend([MockRule("d holds", ("one", "two", "three"))])
    request = request_for("d holds.", runs=5)
    assert backend.complete(request) == backend.complete(request)


def test_mock_without_matching_rule_raises():
    backend = MockBackend([MockRule("nothing like this", ("x",))])
    with pytest.raises(BackendError):
        backend.complete(request_for("e holds."))


def test_mock_rule_validation():
    with pytest.raises(ValueError):
        MockRule("", ("x",))
    with pytest.raises(ValueError):
        MockRule("match", ())


def test_mock_rules_from_json():
    rules = mock_rules_from_json(
        '[{"match": "a", "completions": ["one", "two"]}]'
    )
    assert rules == (MockRule("a", ("one", "two")),)
    with pytest.raises(ValueError):
        mock_rules_from_json("not json")
    with pytest.raises(ValueError):
        mock_rules_from_json('{"match": "a"}')
    with pytest.raises(ValueError):
        mock_rules_from_json('[{"completions": ["x"]}]')


def test_completion_request_validation():
    prompt = prompt_for("a holds.")
    with pytest.raises(ValueError):
        CompletionRequest(prompt="", runs=1)
    with pytest.raises(ValueError):
        CompletionRequest(prompt=prompt, runs=0)
    with pytest.raises(ValueError):
        CompletionRequest(prompt=prompt, temperature=2.5)
    with pytest.raises(ValueError):
        CompletionRequest(prompt=prompt, max_tokens=0)
    with pytest.raises(ValueError):
        CompletionRequest(prompt=prompt, stop_token="")


class _StubHandler(BaseHTTPRequestHandler):
    script: list  # (status, payload, headers) consumed per request
    seen: list
    lock = threading.Lock()

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        with self.lock:
            self.seen.append({"body": body, "headers": dict(self.headers)})
            if self.script:
                status, payload, headers = self.script.pop(0)
            else:
                status, payload, headers = 200, {"choices": [{"text": "fallback"}]}, {}
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        for name, value in headers.items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *_args):
        pass


@pytest.fixture
def stub_server():
    handler = type(
        "Handler", (_StubHandler,), {"script": [], "seen": [], "lock": threading.Lock()}
    )
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}/complete", handler
    finally:
        server.shutdown()
        server.server_close()


def http_backend(url: str, **overrides) -> HttpCompletionBackend:
    config = HttpBackendConfig(
        id="testhttp",
        name="Test provider",
        endpoint=url,
        max_retries=overrides.pop("max_retries", 2),
        backoff_seconds=overrides.pop("backoff_seconds", 0.01),
        timeout_seconds=overrides.pop("timeout_seconds", 5.0),
        **overrides,
    )
    return HttpCompletionBackend(config)


def test_http_happy_path(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "sekret")
    handler.script.extend(
        [
            (200, {"choices": [{"text": "G a\nFINISH leftovers"}]}, {}),
            (200, {"choices": [{"text": "G b"}]}, {}),
        ]
    )
    backend = http_backend(url)
    batch = backend.complete(request_for("a holds.", runs=2))
    assert sorted(batch.completions) == ["G a\n", "G b"]
    assert batch.backend_id == "testhttp"
    request = handler.seen[0]
    assert request["headers"]["Authorization"] == "Bearer sekret"
    assert request["body"]["prompt"].endswith("Explanation:")
    assert request["body"]["temperature"] == 0.2
    assert request["body"]["max_tokens"] == 512
    assert request["body"]["stop"] == "FINISH"


def test_http_missing_credential_fails_before_any_request(stub_server):
    url, handler = stub_server
    backend = http_backend(url)
    with pytest.raises(AuthError) as excinfo:
        backend.complete(request_for("a holds.", runs=1))
    assert "TESTHTTP_API_KEY" in str(excinfo.value)
    assert handler.seen == []


def test_http_credential_env_derived_from_dashed_id(stub_server):
    url, _handler = stub_server
    config = HttpBackendConfig(id="my-llm", name="x", endpoint=url)
    assert config.resolved_credential_env() == "MY_LLM_API_KEY"


def test_http_auth_rejection_fails_fast(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "bad")
    handler.script.append((401, {"error": "no"}, {}))
    backend = http_backend(url)
    with pytest.raises(AuthError):
        backend.complete(request_for("a holds.", runs=1))
    assert len(handler.seen) == 1  # no retry on auth failure


def test_http_rate_limit_surfaces_retry_after(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    handler.script.extend(
        [(429, {}, {"Retry-After": "0.01"})] * 3
    )
    backend = http_backend(url, max_retries=2)
    with pytest.raises(RateLimitError) as excinfo:
        backend.complete(request_for("a holds.", runs=1))
    assert excinfo.value.retry_after == pytest.approx(0.01)
    assert len(handler.seen) == 3  # initial try plus two retries


def test_http_retries_transient_server_errors(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    handler.script.extend(
        [
            (500, {"error": "boom"}, {}),
            (200, {"choices": [{"text": "recovered"}]}, {}),
        ]
    )
    backend = http_backend(url)
    batch = backend.complete(request_for("a holds.", runs=1))
    assert batch.completions == ("recovered",)
    assert len(handler.seen) == 2


def test_http_gives_up_after_retry_budget(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    handler.script.extend([(500, {}, {})] * 5)
    backend = http_backend(url, max_retries=1)
    with pytest.raises(BackendError):
        backend.complete(request_for("a holds.", runs=1))
    assert len(handler.seen) == 2


def test_http_connection_failure_is_batch_error(monkeypatch):
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    backend = http_backend("http://127.0.0.1:1/complete", max_retries=1)
    with pytest.raises(BackendError):
        backend.complete(request_for("a holds.", runs=1))


def test_http_custom_field_mapping_and_response_path(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    handler.script.append((200, {"data": {"out": "G c"}}, {}))
    backend = http_backend(
        url,
        prompt_field="inputs",
        temperature_field="temp",
        max_tokens_field="limit",
        stop_field="halt_on",
        response_path=("data", "out"),
        auth_header="X-Api-Key",
        auth_scheme="",
    )
    batch = backend.complete(request_for("c holds.", runs=1))
    assert batch.completions == ("G c",)
    request = handler.seen[0]
    assert request["headers"]["X-Api-Key"] == "k"
    assert "inputs" in request["body"] and "prompt" not in request["body"]
    assert request["body"]["halt_on"] == "FINISH"


def test_http_bad_response_shape_is_error(stub_server, monkeypatch):
    url, handler = stub_server
    monkeypatch.setenv("TESTHTTP_API_KEY", "k")
    handler.script.append((200, {"unexpected": True}, {}))
    backend = http_backend(url, max_retries=0)
    with pytest.raises(BackendError):
        backend.complete(request_for("a holds.", runs=1))


def test_descriptors():
    mock = MockBackend([MockRule("x", ("y",))])
    assert mock.descriptor().kind == "mock"
    assert mock.descriptor().credential_env is None
    config = HttpBackendConfig(id="remote", name="Remote", endpoint="http://x/y")
    descriptor = HttpCompletionBackend(config).descriptor()
    assert descriptor.kind == "http"
    assert descriptor.credential_env == "REMOTE_API_KEY"
