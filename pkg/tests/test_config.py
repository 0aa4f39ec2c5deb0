"""Config loading, backend registry assembly, template directory merging."""

from pathlib import Path

import pytest

from ltlkit.backends import HttpCompletionBackend, MockBackend
from ltlkit.config import (
    ConfigError,
    ServiceConfig,
    build_backends,
    config_from_dict,
    default_config,
    load_config,
    load_mock_rules,
    load_templates,
    packaged_mock_names,
)

REPO_ROOT = Path(__file__).resolve().parent.parent

TOML_DOC = """
[server]
host = "0.0.0.0"
port = 9001
auth_token_env = "MY_TOKEN"

[store]
sessions_dir = "/tmp/sessions-here"

[defaults]
backend = "mock"
template = "indistribution"
temperature = 0.5
runs = 5

[mock]
rules = ["packaged:workflows"]

[[backends]]
id = "remote"
name = "Remote completions"
endpoint = "https://api.example.test/complete"
credential_env = "REMOTE_KEY"
response_path = ["output", 0, "text"]
extra_body = { model = "m1" }
"""


def test_defaults():
    config = default_config()
    assert config.port == 8000
    assert config.default_backend == "mock"
    assert config.default_template == "minimal"
    assert config.default_temperature == 0.2
    assert config.default_runs == 3
    assert config.skip_validation == frozenset({"stl"})
    assert config.mock_rules == ("packaged:workflows", "packaged:benchmark")


def test_toml_round_trip(tmp_path):
    path = tmp_path / "service.toml"
    path.write_text(TOML_DOC)
    config = load_config(path)
    assert config.host == "0.0.0.0"
    assert config.port == 9001
    assert config.auth_token_env == "MY_TOKEN"
    assert config.sessions_dir == "/tmp/sessions-here"
    assert config.default_template == "indistribution"
    assert config.default_runs == 5
    assert config.mock_rules == ("packaged:workflows",)
    assert len(config.http_backends) == 1
    backend = config.http_backends[0]
    assert backend.id == "remote"
    assert backend.response_path == ("output", 0, "text")
    assert backend.extra_body == (("model", "m1"),)


def test_json_config_equivalent(tmp_path):
    path = tmp_path / "service.json"
    path.write_text(
        '{"server": {"port": 9100}, "defaults": {"runs": 2},'
        ' "backends": [{"id": "r2", "name": "R2", "endpoint": "https://x.test/v1"}]}'
    )
    config = load_config(path)
    assert config.port == 9100
    assert config.default_runs == 2
    assert config.http_backends[0].id == "r2"


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[server]\nprot = 1\n")
    with pytest.raises(ConfigError, match="prot"):
        load_config(path)
    with pytest.raises(ConfigError, match="snacks"):
        config_from_dict({"snacks": {}})


def test_backend_entry_requires_core_fields():
    with pytest.raises(ConfigError, match="endpoint"):
        config_from_dict({"backends": [{"id": "x", "name": "X"}]})


def test_unsupported_format_and_missing_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("a: 1")
    with pytest.raises(ConfigError, match="unsupported"):
        load_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.toml")


def test_invalid_toml_reports_config_error(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[server\nport=1")
    with pytest.raises(ConfigError, match="invalid TOML"):
        load_config(path)


def test_build_backends_always_has_mock():
    registry = build_backends(default_config())
    assert isinstance(registry["mock"], MockBackend)


def test_build_backends_adds_http_and_rejects_duplicates():
    config = config_from_dict(
        {"backends": [{"id": "remote", "name": "R", "endpoint": "https://x.test"}]}
    )
    registry = build_backends(config)
    assert isinstance(registry["remote"], HttpCompletionBackend)
    clash = config_from_dict(
        {"backends": [{"id": "mock", "name": "M", "endpoint": "https://x.test"}]}
    )
    with pytest.raises(ConfigError, match="duplicate"):
        build_backends(clash)


def test_packaged_mock_names():
    assert packaged_mock_names() == ["benchmark", "workflows"]


def test_load_mock_rules_merges_in_order(tmp_path):
    extra = tmp_path / "extra.json"
    extra.write_text('[{"match": "zzz", "completions": ["body"]}]')
    rules = load_mock_rules(["packaged:workflows", str(extra)])
    assert rules[-1].matcher == "zzz"
    assert any("grant 0 and grant 1" in rule.matcher for rule in rules)


def test_load_mock_rules_unknown_packaged():
    with pytest.raises(ConfigError, match="unknown packaged"):
        load_mock_rules(["packaged:nope"])


def test_load_mock_rules_bad_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid mock rules"):
        load_mock_rules([str(bad)])


def test_load_templates_packaged_set():
    templates = load_templates(default_config())
    assert set(templates) == {"minimal", "indistribution", "smarthome", "stl"}


CUSTOM_TEMPLATE = """Translate natural language into LTL.

Natural Language: a holds forever.
Given translations: {}
Explanation: Forever means at every step.
Explanation dictionary: {"a holds forever": "G a"}
So, the final LTL translation is: G a.
FINISH
"""

NON_LTL_TEMPLATE = """Translate natural language into MTL.

Natural Language: a within five seconds.
Given translations: {}
Explanation: Bounded eventually.
Explanation dictionary: {}
So, the final LTL translation is: F[0,5] a.
FINISH
"""


def test_load_templates_from_directory(tmp_path):
    directory = tmp_path / "templates"
    directory.mkdir()
    (directory / "custom.txt").write_text(CUSTOM_TEMPLATE)
    config = config_from_dict({"templates": {"dir": str(directory)}})
    templates = load_templates(config)
    assert "custom" in templates
    assert templates["custom"].examples[0].final_translation == "G a"


def test_template_skip_validation_is_config_driven(tmp_path):
    directory = tmp_path / "templates"
    directory.mkdir()
    (directory / "mtl.txt").write_text(NON_LTL_TEMPLATE)
    strict = config_from_dict({"templates": {"dir": str(directory)}})
    with pytest.raises(Exception):
        load_templates(strict)
    lenient = config_from_dict(
        {"templates": {"dir": str(directory), "skip_validation": ["mtl"]}}
    )
    templates = load_templates(lenient)
    assert "mtl" in templates


def test_missing_template_dir_rejected():
    config = config_from_dict({"templates": {"dir": "/nonexistent/t-dir"}})
    with pytest.raises(ConfigError, match="does not exist"):
        load_templates(config)


def test_repo_example_config_loads():
    config = load_config(REPO_ROOT / "config.example.toml")
    assert config.port == 8000
    assert {backend.id for backend in config.http_backends} == {
        "local-completions",
        "hosted-text",
    }
    assert config.http_backends[1].auth_scheme == ""
    registry = build_backends(config)
    assert set(registry) == {"mock", "local-completions", "hosted-text"}
