"""Service configuration: files in TOML or JSON, one flat dataclass in memory.

The backend registry always contains the scripted mock (rules merged from the
configured rule files, packaged ones addressable as "packaged:<name>") plus
any HTTP backends declared in the config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .backends import (
    CompletionBackend,
    HttpBackendConfig,
    HttpCompletionBackend,
    MockBackend,
    mock_rules_from_json,
)
from .prompts import (
    PromptTemplate,
    load_packaged_template,
    load_template_file,
    packaged_template_ids,
)

_MOCK_DATA_PACKAGE = "ltlkit.data.mocks"

DEFAULT_MOCK_RULES = ("packaged:workflows", "packaged:benchmark")


class ConfigError(Exception):
    code = "config_error"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    sessions_dir: str = "sessions"
    static_dir: str | None = None
    auth_token_env: str | None = None
    template_dir: str | None = None
    skip_validation: frozenset[str] = frozenset({"stl"})
    default_backend: str = "mock"
    default_template: str = "minimal"
    default_temperature: float = 0.2
    default_runs: int = 3
    mock_rules: tuple[str, ...] = DEFAULT_MOCK_RULES
    http_backends: tuple[HttpBackendConfig, ...] = field(default_factory=tuple)


def default_config() -> ServiceConfig:
    return ServiceConfig()


def _require_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        names = ", ".join(sorted(unknown))
        raise ConfigError(f"unknown key(s) in [{section}]: {names}")


def _http_backend_from_dict(data: dict) -> HttpBackendConfig:
    allowed = {
        "id",
        "name",
        "endpoint",
        "credential_env",
        "auth_header",
        "auth_scheme",
        "prompt_field",
        "temperature_field",
        "max_tokens_field",
        "stop_field",
        "response_path",
        "extra_body",
        "max_retries",
        "backoff_seconds",
        "timeout_seconds",
    }
    _require_keys("backends", data, allowed)
    for required in ("id", "name", "endpoint"):
        if required not in data:
            raise ConfigError(f"backend entry missing required key: {required}")
    kwargs = dict(data)
    if "response_path" in kwargs:
        kwargs["response_path"] = tuple(kwargs["response_path"])
    if "extra_body" in kwargs:
        kwargs["extra_body"] = tuple(sorted(kwargs["extra_body"].items()))
    try:
        return HttpBackendConfig(**kwargs)
    except (TypeError, ValueError) as error:
        raise ConfigError(f"invalid backend entry: {error}") from error


def config_from_dict(data: dict) -> ServiceConfig:
    _require_keys(
        "root", data, {"server", "store", "templates", "defaults", "mock", "backends"}
    )
    server = data.get("server", {})
    _require_keys("server", server, {"host", "port", "static_dir", "auth_token_env"})
    store = data.get("store", {})
    _require_keys("store", store, {"sessions_dir"})
    templates = data.get("templates", {})
    _require_keys("templates", templates, {"dir", "skip_validation"})
    defaults = data.get("defaults", {})
    _require_keys("defaults", defaults, {"backend", "template", "temperature", "runs"})
    mock = data.get("mock", {})
    _require_keys("mock", mock, {"rules"})
    backends = data.get("backends", [])
    if not isinstance(backends, list):
        raise ConfigError("backends must be an array of tables")
    try:
        return ServiceConfig(
            host=server.get("host", "127.0.0.1"),
            port=int(server.get("port", 8000)),
            sessions_dir=store.get("sessions_dir", "sessions"),
            static_dir=server.get("static_dir"),
            auth_token_env=server.get("auth_token_env"),
            template_dir=templates.get("dir"),
            skip_validation=frozenset(templates.get("skip_validation", ["stl"])),
            default_backend=defaults.get("backend", "mock"),
            default_template=defaults.get("template", "minimal"),
            default_temperature=float(defaults.get("temperature", 0.2)),
            default_runs=int(defaults.get("runs", 3)),
            mock_rules=tuple(mock.get("rules", DEFAULT_MOCK_RULES)),
            http_backends=tuple(
                _http_backend_from_dict(entry) for entry in backends
            ),
        )
    except (TypeError, ValueError) as error:
        raise ConfigError(f"invalid config value: {error}") from error


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as error:
        raise ConfigError(f"cannot read config file {path}: {error}") from error
    if path.suffix == ".toml":
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as error:
            raise ConfigError(f"invalid TOML in {path}: {error}") from error
    elif path.suffix == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as error:
            raise ConfigError(f"invalid JSON in {path}: {error}") from error
    else:
        raise ConfigError(f"unsupported config format: {path.suffix or path.name}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table/object")
    return config_from_dict(data)


def packaged_mock_names() -> list[str]:
    names = []
    for item in resources.files(_MOCK_DATA_PACKAGE).iterdir():
        if item.name.endswith(".json"):
            names.append(item.name[: -len(".json")])
    return sorted(names)


def load_mock_rules(specs: tuple[str, ...] | list[str]):
    rules = []
    for spec in specs:
        if spec.startswith("packaged:"):
            name = spec[len("packaged:"):]
            resource = resources.files(_MOCK_DATA_PACKAGE) / f"{name}.json"
            try:
                text = resource.read_text(encoding="utf-8")
            except (FileNotFoundError, OSError) as error:
                raise ConfigError(f"unknown packaged mock rules: {name}") from error
        else:
            try:
                text = Path(spec).read_text(encoding="utf-8")
            except OSError as error:
                raise ConfigError(f"cannot read mock rules {spec}: {error}") from error
        try:
            rules.extend(mock_rules_from_json(text))
        except (ValueError, json.JSONDecodeError) as error:
            raise ConfigError(f"invalid mock rules in {spec}: {error}") from error
    return rules


def build_backends(config: ServiceConfig) -> dict[str, CompletionBackend]:
    registry: dict[str, CompletionBackend] = {
        "mock": MockBackend(load_mock_rules(config.mock_rules))
    }
    for backend_config in config.http_backends:
        if backend_config.id in registry:
            raise ConfigError(f"duplicate backend id: {backend_config.id}")
        registry[backend_config.id] = HttpCompletionBackend(backend_config)
    return registry


def load_templates(config: ServiceConfig) -> dict[str, PromptTemplate]:
    templates = {
        template_id: load_packaged_template(template_id)
        for template_id in packaged_template_ids()
    }
    if config.template_dir:
        directory = Path(config.template_dir)
        if not directory.is_dir():
            raise ConfigError(f"template dir does not exist: {directory}")
        for path in sorted(directory.glob("*.txt")):
            template_id = path.stem
            templates[template_id] = load_template_file(
                path,
                template_id,
                validate=template_id not in config.skip_validation,
            )
    return templates
