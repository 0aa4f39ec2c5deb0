"""Batch accuracy evaluation over a JSONL benchmark of NL/formula pairs.

Each instance is translated through a fresh session; the prediction is judged
against the gold formula first by canonical syntax, then by bounded trace
equivalence.  The scripted-interactive mode replays recorded edit rounds
between translate calls, capped at a loop budget, mirroring how a user would
repair a wrong first attempt.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .ltl import (
    AlphabetTooLargeError,
    Bound,
    Formula,
    ParseError,
    atoms,
    canonical,
    check_equivalence,
    parse,
)
from .session import SessionEngine, SessionError, SessionSettings, TranslateFailure

_DATASET_PACKAGE = "ltlkit.data.datasets"
_SCRIPT_PACKAGE = "ltlkit.data.scripts"

DEFAULT_ALLOWED_ATOMS = frozenset({"a", "b", "c", "d", "e"})
DEFAULT_MAX_LOOPS = 3

VERDICT_EXACT = "exact"
VERDICT_EQUIVALENT = "equivalent"
VERDICT_DIFFERENT = "different"
VERDICT_ERROR = "error"

MODE_INITIAL = "initial"
MODE_SCRIPTED = "scripted-interactive"


class DatasetError(ValueError):
    pass


class ScriptError(ValueError):
    pass


@dataclass(frozen=True)
class BenchmarkInstance:
    nl: str
    gold_text: str
    gold: Formula
    tags: tuple[str, ...] = ()


def load_dataset(
    document: str,
    source: str = "<dataset>",
    allowed_atoms: frozenset[str] | None = DEFAULT_ALLOWED_ATOMS,
) -> list[BenchmarkInstance]:
    instances = []
    for line_number, line in enumerate(document.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"{source}:{line_number}"
        try:
            record = json.loads(line)
        except json.JSONDecodeError as error:
            raise DatasetError(f"{where}: invalid JSON ({error})") from error
        if not isinstance(record, dict):
            raise DatasetError(f"{where}: each line must be a JSON object")
        unknown = set(record) - {"nl", "gold", "tags"}
        if unknown:
            raise DatasetError(f"{where}: unknown field(s) {sorted(unknown)}")
        nl = record.get("nl")
        gold_text = record.get("gold")
        if not isinstance(nl, str) or not nl.strip():
            raise DatasetError(f"{where}: nl must be a nonempty string")
        if not isinstance(gold_text, str):
            raise DatasetError(f"{where}: gold must be a string")
        try:
            gold = parse(gold_text)
        except ParseError as error:
            raise DatasetError(f"{where}: gold does not parse ({error})") from error
        if allowed_atoms is not None:
            extra = atoms(gold) - allowed_atoms
            if extra:
                names = ", ".join(sorted(extra))
                raise DatasetError(f"{where}: gold uses atoms outside the allowed set: {names}")
        tags = record.get("tags", [])
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise DatasetError(f"{where}: tags must be a list of strings")
        instances.append(
            BenchmarkInstance(nl=nl, gold_text=gold_text, gold=gold, tags=tuple(tags))
        )
    if not instances:
        raise DatasetError(f"{source}: dataset is empty")
    return instances


def load_dataset_file(
    path: str | Path,
    allowed_atoms: frozenset[str] | None = DEFAULT_ALLOWED_ATOMS,
) -> list[BenchmarkInstance]:
    path = Path(path)
    return load_dataset(
        path.read_text(encoding="utf-8"), source=str(path), allowed_atoms=allowed_atoms
    )


def packaged_dataset(name: str = "expert") -> list[BenchmarkInstance]:
    resource = resources.files(_DATASET_PACKAGE) / f"{name}.jsonl"
    try:
        text = resource.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as error:
        raise DatasetError(f"unknown packaged dataset: {name}") from error
    return load_dataset(text, source=f"packaged:{name}")


def load_scripts(document: str, source: str = "<scripts>") -> dict[str, list[list[dict]]]:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as error:
        raise ScriptError(f"{source}: invalid JSON ({error})") from error
    if not isinstance(data, dict):
        raise ScriptError(f"{source}: scripts root must be an object keyed by nl")
    for nl, rounds in data.items():
        if not isinstance(rounds, list):
            raise ScriptError(f"{source}: rounds for {nl!r} must be a list")
        for round_ops in rounds:
            if not isinstance(round_ops, list):
                raise ScriptError(f"{source}: each round for {nl!r} must be a list of ops")
            for op in round_ops:
                if not isinstance(op, dict) or op.get("op") not in ("add", "edit", "delete"):
                    raise ScriptError(f"{source}: bad op in script for {nl!r}: {op!r}")
                if "fragment" not in op:
                    raise ScriptError(f"{source}: op missing fragment for {nl!r}")
                if op["op"] in ("add", "edit") and "formulaText" not in op:
                    raise ScriptError(f"{source}: {op['op']} op missing formulaText for {nl!r}")
    return data


def load_scripts_file(path: str | Path) -> dict[str, list[list[dict]]]:
    path = Path(path)
    return load_scripts(path.read_text(encoding="utf-8"), source=str(path))


def packaged_scripts(name: str = "workflows") -> dict[str, list[list[dict]]]:
    resource = resources.files(_SCRIPT_PACKAGE) / f"{name}.json"
    try:
        text = resource.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as error:
        raise ScriptError(f"unknown packaged scripts: {name}") from error
    return load_scripts(text, source=f"packaged:{name}")


def judge(gold: Formula, predicted_text: str | None, bound: Bound) -> str:
    if predicted_text is None:
        return VERDICT_ERROR
    try:
        predicted = parse(predicted_text)
    except ParseError:
        return VERDICT_ERROR
    if canonical(predicted) == canonical(gold):
        return VERDICT_EXACT
    try:
        result = check_equivalence(gold, predicted, bound)
    except AlphabetTooLargeError:
        return VERDICT_ERROR
    return VERDICT_EQUIVALENT if result.equivalent else VERDICT_DIFFERENT


def _apply_op(engine: SessionEngine, state, op: dict):
    kind = op["op"]
    if kind == "add":
        return engine.add_sub_translation(state, op["fragment"], op["formulaText"])
    if kind == "edit":
        return engine.edit_sub_translation(state, op["fragment"], op["formulaText"])
    return engine.delete_sub_translation(state, op["fragment"])


def evaluate_instance(
    engine: SessionEngine,
    instance: BenchmarkInstance,
    settings: SessionSettings,
    mode: str = MODE_INITIAL,
    scripts: dict[str, list[list[dict]]] | None = None,
    max_loops: int = DEFAULT_MAX_LOOPS,
    bound: Bound = Bound(),
) -> dict:
    predicted: str | None = None
    loops = 0
    try:
        state = engine.new_session(instance.nl, settings)
        state = engine.translate(state)
        loops = 1
        predicted = state.last_result.final.text
        verdict = judge(instance.gold, predicted, bound)
        if mode == MODE_SCRIPTED:
            rounds = (scripts or {}).get(instance.nl, [])
            for round_ops in rounds:
                if verdict in (VERDICT_EXACT, VERDICT_EQUIVALENT) or loops >= max_loops:
                    break
                for op in round_ops:
                    state = _apply_op(engine, state, op)
                state = engine.translate(state)
                loops += 1
                predicted = state.last_result.final.text
                verdict = judge(instance.gold, predicted, bound)
    except (TranslateFailure, SessionError):
        verdict = VERDICT_ERROR
    return {
        "nl": instance.nl,
        "gold": instance.gold_text,
        "predicted": predicted,
        "verdict": verdict,
        "loops": loops,
        "tags": list(instance.tags),
    }


def run_benchmark(
    instances: list[BenchmarkInstance],
    engine: SessionEngine,
    settings: SessionSettings,
    mode: str = MODE_INITIAL,
    scripts: dict[str, list[list[dict]]] | None = None,
    max_loops: int = DEFAULT_MAX_LOOPS,
    bound: Bound = Bound(),
    workers: int = 4,
) -> dict:
    if mode not in (MODE_INITIAL, MODE_SCRIPTED):
        raise ValueError(f"unknown mode: {mode!r}")
    if not instances:
        raise DatasetError("dataset is empty")

    def one(instance: BenchmarkInstance) -> dict:
        return evaluate_instance(
            engine, instance, settings, mode=mode, scripts=scripts,
            max_loops=max_loops, bound=bound,
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_instance = list(pool.map(one, instances))

    syntactic = sum(1 for row in per_instance if row["verdict"] == VERDICT_EXACT)
    semantic = sum(
        1 for row in per_instance if row["verdict"] in (VERDICT_EXACT, VERDICT_EQUIVALENT)
    )
    by_tag: dict[str, dict[str, int]] = {}
    for row in per_instance:
        for tag in row["tags"]:
            bucket = by_tag.setdefault(
                tag, {"total": 0, "correctSyntactic": 0, "correctSemantic": 0}
            )
            bucket["total"] += 1
            if row["verdict"] == VERDICT_EXACT:
                bucket["correctSyntactic"] += 1
            if row["verdict"] in (VERDICT_EXACT, VERDICT_EQUIVALENT):
                bucket["correctSemantic"] += 1
    return {
        "mode": mode,
        "settings": {
            "backendId": settings.backend_id,
            "templateId": settings.template_id,
            "temperature": settings.temperature,
            "runs": settings.runs,
        },
        "bound": {"maxPrefix": bound.max_prefix, "maxLoop": bound.max_loop},
        "maxLoops": max_loops,
        "total": len(per_instance),
        "correctSyntactic": syntactic,
        "correctSemantic": semantic,
        "accuracySyntactic": syntactic / len(per_instance),
        "accuracySemantic": semantic / len(per_instance),
        "byTag": by_tag,
        "perInstance": per_instance,
    }


def report_text(report: dict) -> str:
    """Canonical serialization; identical runs produce identical bytes."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
