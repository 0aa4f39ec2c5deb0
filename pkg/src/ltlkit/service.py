"""HTTP gateway: sessions, translation, templates, backends, equivalence.

Error responses always carry {"error": {"code", "message"}} with codes from a
closed set; request handling is synchronous per endpoint and mutations on one
session are serialized by a per-session lock, so distinct sessions proceed in
parallel.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .aggregate import NoCandidateError
from .backends import BackendError
from .config import ConfigError, ServiceConfig, build_backends, load_templates
from .ltl import (
    AlphabetTooLargeError,
    Bound,
    ParseError,
    check_equivalence,
    parse,
    trace_to_json,
)
from .session import (
    SessionEngine,
    SessionError,
    SessionSettings,
    SessionStore,
    TranslateFailure,
    fragment_hash,
    session_to_json,
)

ERROR_STATUS = {
    "invalid_input": 400,
    "parse_error": 400,
    "index_out_of_range": 400,
    "unauthorized": 401,
    "not_found": 404,
    "unknown_fragment": 404,
    "duplicate_fragment": 409,
    "stale_result": 409,
    "invalid_state": 409,
    "config_error": 500,
    "backend_error": 502,
    "no_candidate": 502,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str, detail: dict | None = None):
        if code not in ERROR_STATUS:
            raise ValueError(f"unknown error code: {code}")
        super().__init__(message)
        self.code = code
        self.detail = detail

    def response(self) -> JSONResponse:
        body: dict = {"error": {"code": self.code, "message": str(self)}}
        if self.detail is not None:
            body["error"]["detail"] = self.detail
        return JSONResponse(body, status_code=ERROR_STATUS[self.code])


def _as_api_error(error: Exception) -> ApiError:
    if isinstance(error, ApiError):
        return error
    if isinstance(error, SessionError):
        return ApiError(error.code, str(error))
    if isinstance(error, NoCandidateError):
        return ApiError("no_candidate", str(error))
    if isinstance(error, BackendError):
        return ApiError("backend_error", str(error))
    if isinstance(error, ConfigError):
        return ApiError("config_error", str(error))
    return ApiError("config_error", f"unexpected failure: {error}")


def _require(payload: dict, key: str, kind: type, what: str):
    value = payload.get(key)
    if not isinstance(value, kind):
        raise ApiError("invalid_input", f"{what} must be present as {kind.__name__}")
    return value


def create_app(
    config: ServiceConfig | None = None,
    backends: dict | None = None,
    templates: dict | None = None,
) -> FastAPI:
    """Build the app; `backends`/`templates` override the config-derived
    registries (used by tests to inject instrumented backends)."""
    config = config or ServiceConfig()
    backends = backends if backends is not None else build_backends(config)
    templates = templates if templates is not None else load_templates(config)
    if config.default_backend not in backends:
        raise ConfigError(f"default backend not registered: {config.default_backend}")
    if config.default_template not in templates:
        raise ConfigError(f"default template not available: {config.default_template}")
    engine = SessionEngine(backends.__getitem__, templates.__getitem__)
    store = SessionStore(config.sessions_dir)

    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(session_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(session_id, threading.Lock())

    auth_token = os.environ.get(config.auth_token_env) if config.auth_token_env else None

    app = FastAPI(title="ltlkit gateway", version=__version__, docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, error: ApiError):
        return error.response()

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(_request: Request, error: RequestValidationError):
        return ApiError("invalid_input", f"malformed request body: {error}").response()

    if auth_token is not None:
        @app.middleware("http")
        async def shared_secret(request: Request, call_next):
            path = request.url.path
            if path.startswith("/api/") and path != "/api/health":
                if request.headers.get("X-Auth-Token") != auth_token:
                    return ApiError("unauthorized", "missing or wrong X-Auth-Token").response()
            return await call_next(request)

    def settings_from_payload(payload: dict | None) -> SessionSettings:
        payload = payload or {}
        unknown = set(payload) - {"backendId", "templateId", "temperature", "runs"}
        if unknown:
            raise ApiError("invalid_input", f"unknown settings key(s): {sorted(unknown)}")
        backend_id = payload.get("backendId", config.default_backend)
        template_id = payload.get("templateId", config.default_template)
        if backend_id not in backends:
            raise ApiError("invalid_input", f"unknown backend: {backend_id}")
        if template_id not in templates:
            raise ApiError("invalid_input", f"unknown template: {template_id}")
        try:
            return SessionSettings(
                backend_id=backend_id,
                template_id=template_id,
                temperature=float(payload.get("temperature", config.default_temperature)),
                runs=int(payload.get("runs", config.default_runs)),
            )
        except (TypeError, ValueError) as error:
            raise ApiError("invalid_input", f"bad settings: {error}") from error

    def load_session(session_id: str):
        state = store.load(session_id)
        if state is None:
            raise ApiError("not_found", f"no such session: {session_id}")
        return state

    def resolve_fragment(state, fragment_hash_value: str) -> str:
        for entry in state.sub_translations:
            if fragment_hash(entry.fragment) == fragment_hash_value:
                return entry.fragment
        if state.last_result is not None:
            for scores in state.last_result.sub_translations:
                if fragment_hash(scores.fragment) == fragment_hash_value:
                    return scores.fragment
        raise ApiError("unknown_fragment", f"no fragment with hash {fragment_hash_value}")

    def mutate(session_id: str, operation):
        """Load-modify-save under the session lock; translate failures persist
        their history entry before the error propagates."""
        with lock_for(session_id):
            state = load_session(session_id)
            try:
                state = operation(state)
            except TranslateFailure as failure:
                store.save(failure.state)
                raise _as_api_error(failure.cause) from failure
            except SessionError as error:
                raise _as_api_error(error) from error
            store.save(state)
            return session_to_json(state)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/sessions", status_code=201)
    def create_session(payload: dict):
        nl = _require(payload, "nl", str, "nl")
        settings_payload = payload.get("settings")
        if settings_payload is not None and not isinstance(settings_payload, dict):
            raise ApiError("invalid_input", "settings must be an object")
        settings = settings_from_payload(settings_payload)
        try:
            state = engine.new_session(nl, settings)
        except SessionError as error:
            raise _as_api_error(error) from error
        store.save(state)
        return session_to_json(state)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return session_to_json(load_session(session_id))

    @app.post("/api/sessions/{session_id}/translate")
    def translate_session(session_id: str):
        return mutate(session_id, engine.translate)

    @app.post("/api/sessions/{session_id}/subtranslations")
    def add_sub_translation(session_id: str, payload: dict):
        fragment = _require(payload, "fragment", str, "fragment")
        formula_text = _require(payload, "formulaText", str, "formulaText")
        return mutate(
            session_id,
            lambda state: engine.add_sub_translation(state, fragment, formula_text),
        )

    @app.put("/api/sessions/{session_id}/subtranslations/{fragment_hash_value}")
    def edit_sub_translation(session_id: str, fragment_hash_value: str, payload: dict):
        formula_text = _require(payload, "formulaText", str, "formulaText")

        def operation(state):
            fragment = resolve_fragment(state, fragment_hash_value)
            return engine.edit_sub_translation(state, fragment, formula_text)

        return mutate(session_id, operation)

    @app.delete("/api/sessions/{session_id}/subtranslations/{fragment_hash_value}")
    def delete_sub_translation(session_id: str, fragment_hash_value: str):
        def operation(state):
            fragment = resolve_fragment(state, fragment_hash_value)
            return engine.delete_sub_translation(state, fragment)

        return mutate(session_id, operation)

    @app.post("/api/sessions/{session_id}/select")
    def select_alternative(session_id: str, payload: dict):
        target = _require(payload, "target", str, "target")
        index = payload.get("index")
        if isinstance(index, bool) or not isinstance(index, int):
            raise ApiError("invalid_input", "index must be an integer")

        def operation(state):
            resolved = target if target == "final" else resolve_fragment(state, target)
            return engine.select_alternative(state, resolved, index)

        return mutate(session_id, operation)

    @app.post("/api/sessions/{session_id}/approve")
    def approve_session(session_id: str):
        return mutate(session_id, engine.approve)

    @app.get("/api/templates")
    def list_templates():
        return {
            "templates": [
                {
                    "id": template_id,
                    "exampleCount": len(template.examples),
                    "stopToken": template.stop_token,
                }
                for template_id, template in sorted(templates.items())
            ]
        }

    @app.get("/api/backends")
    def list_backends():
        rows = []
        for backend_id in sorted(backends):
            descriptor = backends[backend_id].descriptor()
            rows.append(
                {
                    "id": descriptor.id,
                    "name": descriptor.name,
                    "kind": descriptor.kind,
                    "credentialEnv": descriptor.credential_env,
                }
            )
        return {"backends": rows}

    @app.post("/api/equivalent")
    def equivalence(payload: dict):
        first_text = _require(payload, "f", str, "f")
        second_text = _require(payload, "g", str, "g")

        def parse_side(which: str, text: str):
            try:
                return parse(text)
            except ParseError as error:
                raise ApiError(
                    "parse_error", f"{which} does not parse: {error}", {"which": which}
                ) from error

        first = parse_side("f", first_text)
        second = parse_side("g", second_text)
        bound_payload = payload.get("bound") or {}
        if not isinstance(bound_payload, dict):
            raise ApiError("invalid_input", "bound must be an object")
        try:
            bound = Bound(
                max_prefix=int(bound_payload.get("maxPrefix", 3)),
                max_loop=int(bound_payload.get("maxLoop", 3)),
            )
        except (TypeError, ValueError) as error:
            raise ApiError("invalid_input", f"bad bound: {error}") from error
        alphabet = payload.get("alphabet")
        if alphabet is not None and (
            not isinstance(alphabet, list) or not all(isinstance(x, str) for x in alphabet)
        ):
            raise ApiError("invalid_input", "alphabet must be a list of atom names")
        try:
            result = check_equivalence(
                first, second, bound, tuple(alphabet) if alphabet is not None else None
            )
        except (AlphabetTooLargeError, ValueError) as error:
            raise ApiError("invalid_input", str(error)) from error
        return {
            "equivalent": result.equivalent,
            "status": result.status,
            "bound": {"maxPrefix": result.bound.max_prefix, "maxLoop": result.bound.max_loop},
            "alphabet": list(result.alphabet),
            "tracesChecked": result.traces_checked,
            "witness": trace_to_json(result.witness) if result.witness else None,
            "witnessValues": (
                {"f": result.witness_values[0], "g": result.witness_values[1]}
                if result.witness_values is not None
                else None
            ),
            "f": result.lhs,
            "g": result.rhs,
        }

    if config.static_dir:
        static_path = Path(config.static_dir)
        if static_path.is_dir():
            app.mount("/", StaticFiles(directory=static_path, html=True), name="static")

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


__all__ = ["ApiError", "ERROR_STATUS", "create_app", "serve"]
