"""Command line front door: one-shot translate, HTTP serve, batch eval."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aggregate import NoCandidateError, result_to_json
from .backends import BackendError
from .config import (
    ConfigError,
    ServiceConfig,
    build_backends,
    default_config,
    load_config,
    load_templates,
)
from .evalharness import (
    DEFAULT_MAX_LOOPS,
    MODE_INITIAL,
    MODE_SCRIPTED,
    DatasetError,
    ScriptError,
    load_dataset_file,
    load_scripts_file,
    packaged_dataset,
    packaged_scripts,
    report_text,
    run_benchmark,
)
from .prompts import TemplateError, load_template_file
from .session import SessionEngine, SessionError, SessionSettings, TranslateFailure

GIVEN_SEPARATOR = " := "


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlkit",
        description="Translate natural language into LTL with editable sub-translations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    translate = sub.add_parser("translate", help="one-shot translation")
    translate.add_argument("--nl", required=True, help="natural language input")
    translate.add_argument(
        "--prompt",
        default=None,
        help="template id or path to a template file (default: configured template)",
    )
    translate.add_argument("--backend", default=None, help="backend id (default: configured)")
    translate.add_argument("--temperature", type=float, default=None)
    translate.add_argument("--num-runs", type=int, default=None, dest="num_runs")
    translate.add_argument(
        "--given",
        action="append",
        default=[],
        metavar="FRAGMENT := FORMULA",
        help="locked sub-translation, repeatable",
    )
    translate.add_argument("--format", choices=("text", "json"), default="text")
    translate.add_argument("--config", default=None, help="path to a TOML/JSON config file")

    serve = sub.add_parser("serve", help="run the HTTP gateway")
    serve.add_argument("--config", default=None)
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    evaluate = sub.add_parser("eval", help="batch-evaluate a benchmark dataset")
    evaluate.add_argument("--dataset", default=None, help="JSONL path (default: packaged set)")
    evaluate.add_argument("--backend", default=None)
    evaluate.add_argument("--template", default=None)
    evaluate.add_argument(
        "--mode", choices=(MODE_INITIAL, MODE_SCRIPTED), default=MODE_INITIAL
    )
    evaluate.add_argument("--scripts", default=None, help="edit-script JSON path")
    evaluate.add_argument("--out", default=None, help="write the full report here")
    evaluate.add_argument("--max-loops", type=int, default=DEFAULT_MAX_LOOPS)
    evaluate.add_argument("--workers", type=int, default=4)
    evaluate.add_argument("--config", default=None)
    return parser


def _load_config_arg(path: str | None) -> ServiceConfig:
    return load_config(path) if path else default_config()


def _resolve_template(spec: str, templates: dict):
    if spec in templates:
        return spec, templates
    path = Path(spec)
    if path.is_file():
        template = load_template_file(path)
        merged = dict(templates)
        merged[template.id] = template
        return template.id, merged
    raise ConfigError(f"unknown template id or file: {spec}")


def _parse_given(arguments: list[str], parser_error) -> list[tuple[str, str]]:
    pairs = []
    for argument in arguments:
        if GIVEN_SEPARATOR not in argument:
            parser_error(
                f"--given must look like \"fragment := formula\", got: {argument!r}"
            )
        fragment, formula_text = argument.split(GIVEN_SEPARATOR, 1)
        pairs.append((fragment.strip(), formula_text.strip()))
    return pairs


def _emit_error(code: str, message: str, output_format: str) -> int:
    if output_format == "json":
        print(json.dumps({"error": {"code": code, "message": message}}))
    else:
        print(f"error ({code}): {message}", file=sys.stderr)
    return 1


def _cmd_translate(args, parser: argparse.ArgumentParser) -> int:
    output_format = args.format
    try:
        config = _load_config_arg(args.config)
        backends = build_backends(config)
        templates = load_templates(config)
        template_id = args.prompt or config.default_template
        template_id, templates = _resolve_template(template_id, templates)
        backend_id = args.backend or config.default_backend
        if backend_id not in backends:
            raise ConfigError(f"unknown backend: {backend_id}")
        settings = SessionSettings(
            backend_id=backend_id,
            template_id=template_id,
            temperature=(
                args.temperature if args.temperature is not None else config.default_temperature
            ),
            runs=args.num_runs if args.num_runs is not None else config.default_runs,
        )
    except (ConfigError, TemplateError, ValueError) as error:
        return _emit_error("config_error", str(error), output_format)

    given = _parse_given(args.given, parser.error)
    engine = SessionEngine(backends, templates)
    try:
        state = engine.new_session(args.nl, settings)
        for fragment, formula_text in given:
            state = engine.add_sub_translation(state, fragment, formula_text)
        state = engine.translate(state)
    except TranslateFailure as failure:
        cause = failure.cause
        code = "no_candidate" if isinstance(cause, NoCandidateError) else "backend_error"
        return _emit_error(code, str(cause), output_format)
    except (SessionError, BackendError) as error:
        code = getattr(error, "code", "backend_error")
        return _emit_error(code, str(error), output_format)

    result = state.last_result
    if output_format == "json":
        print(
            json.dumps(
                {"nl": args.nl, "sessionId": state.id, "result": result_to_json(result)},
                indent=2,
            )
        )
        return 0
    print(result.final.text)
    print(f"confidence: {result.final.confidence:.2f}")
    if result.final_alternatives:
        print("alternatives:")
        for candidate in result.final_alternatives:
            print(f"  {candidate.text}  [{candidate.confidence:.2f}]")
    print("sub-translations:")
    if not result.sub_translations:
        print("  (none)")
    for scores in result.sub_translations:
        print(
            f"  {scores.fragment} := {scores.best.text}  [{scores.best.confidence:.2f}]"
        )
    return 0


def _cmd_serve(args) -> int:
    try:
        config = _load_config_arg(args.config)
        if args.host is not None or args.port is not None:
            from dataclasses import replace

            config = replace(
                config,
                host=args.host if args.host is not None else config.host,
                port=args.port if args.port is not None else config.port,
            )
        from .service import serve

        serve(config)
    except ConfigError as error:
        return _emit_error("config_error", str(error), "text")
    return 0


def _cmd_eval(args) -> int:
    try:
        config = _load_config_arg(args.config)
        backends = build_backends(config)
        templates = load_templates(config)
        backend_id = args.backend or config.default_backend
        template_id = args.template or config.default_template
        if backend_id not in backends:
            raise ConfigError(f"unknown backend: {backend_id}")
        if template_id not in templates:
            raise ConfigError(f"unknown template: {template_id}")
        instances = (
            load_dataset_file(args.dataset) if args.dataset else packaged_dataset()
        )
        scripts = None
        if args.mode == MODE_SCRIPTED:
            scripts = (
                load_scripts_file(args.scripts) if args.scripts else packaged_scripts()
            )
        settings = SessionSettings(
            backend_id=backend_id,
            template_id=template_id,
            temperature=config.default_temperature,
            runs=config.default_runs,
        )
        engine = SessionEngine(backends, templates)
        report = run_benchmark(
            instances,
            engine,
            settings,
            mode=args.mode,
            scripts=scripts,
            max_loops=args.max_loops,
            workers=args.workers,
        )
    except (ConfigError, DatasetError, ScriptError, ValueError, OSError) as error:
        code = "config_error" if isinstance(error, ConfigError) else "invalid_input"
        return _emit_error(code, str(error), "text")

    if args.out:
        Path(args.out).write_text(report_text(report), encoding="utf-8")
    print(
        f"{args.mode}: semantic {report['correctSemantic']}/{report['total']}"
        f", syntactic {report['correctSyntactic']}/{report['total']}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "translate":
        return _cmd_translate(args, parser)
    if args.command == "serve":
        return _cmd_serve(args)
    return _cmd_eval(args)


if __name__ == "__main__":
    sys.exit(main())
