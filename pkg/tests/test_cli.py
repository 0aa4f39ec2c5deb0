"""Command-line behavior: translate output formats, eval runs, serve wiring."""

import json
from importlib import resources

import pytest

from ltlkit.cli import main

GRANT_NL = "Globally, grant 0 and grant 1 do not hold at the same time until it is allowed"


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_translate_requires_nl():
    with pytest.raises(SystemExit) as excinfo:
        main(["translate"])
    assert excinfo.value.code == 2


def test_translate_demo_sentence(capsys):
    code, out, _ = run(capsys, ["translate", "--nl", GRANT_NL])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "G((!((g0 & g1)) U a))"
    assert lines[1] == "confidence: 1.00"
    assert "sub-translations:" in lines
    assert "  do not hold at the same time := !(g0 & g1)  [1.00]" in lines
    assert "  it is allowed := a  [1.00]" in lines


def test_translate_with_given(capsys):
    code, out, _ = run(
        capsys,
        [
            "translate",
            "--nl",
            "a holds until b holds or always a holds",
            "--given",
            "a holds until b holds := (a U b)",
        ],
    )
    assert code == 0
    assert out.splitlines()[0] == "(a U b) | G a"


def test_translate_json_format(capsys):
    code, out, _ = run(
        capsys, ["translate", "--nl", GRANT_NL, "--format", "json"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["nl"] == GRANT_NL
    assert payload["sessionId"]
    assert payload["result"]["final"]["text"] == "G((!((g0 & g1)) U a))"
    assert payload["result"]["runs"] == 3


def test_translate_backend_failure(capsys):
    code, out, _ = run(
        capsys,
        ["translate", "--nl", "nothing matches this", "--format", "json"],
    )
    assert code == 1
    payload = json.loads(out)
    assert payload["error"]["code"] == "backend_error"


def test_translate_backend_failure_text(capsys):
    code, out, err = run(capsys, ["translate", "--nl", "nothing matches this"])
    assert code == 1
    assert out == ""
    assert err.startswith("error (backend_error):")


def test_translate_bad_given_syntax():
    with pytest.raises(SystemExit) as excinfo:
        main(["translate", "--nl", "x", "--given", "fragment=formula"])
    assert excinfo.value.code == 2


def test_translate_unknown_backend(capsys):
    code, _, err = run(
        capsys, ["translate", "--nl", GRANT_NL, "--backend", "missing"]
    )
    assert code == 1
    assert "error (config_error)" in err


def test_translate_with_template_file(tmp_path, capsys):
    source = resources.files("ltlkit.data.templates") / "minimal.txt"
    template_path = tmp_path / "custom.txt"
    template_path.write_text(source.read_text(encoding="utf-8"), encoding="utf-8")
    code, out, _ = run(
        capsys,
        ["translate", "--nl", GRANT_NL, "--prompt", str(template_path)],
    )
    assert code == 0
    assert out.splitlines()[0] == "G((!((g0 & g1)) U a))"


def test_translate_unknown_template(capsys):
    code, _, err = run(
        capsys, ["translate", "--nl", GRANT_NL, "--prompt", "no-such-template"]
    )
    assert code == 1
    assert "error (config_error)" in err


def test_eval_initial_mode(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, ["eval", "--out", str(out_path)])
    assert code == 0
    assert "initial: semantic 16/36, syntactic 13/36" in out
    report = json.loads(out_path.read_text(encoding="utf-8"))
    assert report["correctSemantic"] == 16
    assert report["correctSyntactic"] == 13
    assert report["total"] == 36
    assert len(report["perInstance"]) == 36


def test_eval_reports_identical_across_runs(tmp_path, capsys):
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    assert main(["eval", "--out", str(first)]) == 0
    assert main(["eval", "--out", str(second), "--workers", "2"]) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()


def test_eval_scripted_mode(capsys):
    code, out, _ = run(capsys, ["eval", "--mode", "scripted-interactive"])
    assert code == 0
    assert "scripted-interactive: semantic 18/36" in out


def test_eval_bad_dataset(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{broken\n", encoding="utf-8")
    code, _, err = run(capsys, ["eval", "--dataset", str(bad)])
    assert code == 1
    assert "error (invalid_input)" in err

    code, _, err = run(capsys, ["eval", "--dataset", str(tmp_path / "missing.jsonl")])
    assert code == 1


def test_eval_unknown_backend(capsys):
    code, _, err = run(capsys, ["eval", "--backend", "nope"])
    assert code == 1
    assert "error (config_error)" in err


def test_serve_applies_overrides(monkeypatch):
    seen = {}

    def fake_serve(config):
        seen["host"] = config.host
        seen["port"] = config.port

    monkeypatch.setattr("ltlkit.service.serve", fake_serve)
    assert main(["serve", "--host", "0.0.0.0", "--port", "9001"]) == 0
    assert seen == {"host": "0.0.0.0", "port": 9001}
