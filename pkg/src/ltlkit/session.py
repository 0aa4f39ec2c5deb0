"""Interactive translation sessions: the add/edit/delete/translate/approve loop.

A session holds one natural-language sentence and an evolving list of
sub-translations.  User-supplied entries are locked and feed the prompt's
given-translations dictionary; model entries are replaced wholesale by
each translate.  Every transition appends one history entry carrying the
action, its parameters, and a snapshot, so a session can be audited or
replayed against a deterministic backend.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping

from .aggregate import (
    AggregatedResult,
    FragmentScores,
    NoCandidateError,
    aggregate,
    result_from_json,
    result_to_json,
)
from .backends import BackendError, CompletionBackend, CompletionRequest
from .prompts import PromptTemplate, compute_prompt
from .ltl.parser import BINARY_TOKEN_KINDS, ParseError, parse, tokenize
from .responses import ResponseParseError, parse_completion

SCHEMA_VERSION = 1

STATUS_DRAFT = "draft"
STATUS_TRANSLATED = "translated"
STATUS_APPROVED = "approved"

ORIGIN_USER = "user"
ORIGIN_MODEL = "model"


class SessionError(Exception):
    """Base for session-level failures; ``code`` is the stable API name."""

    code = "invalid_input"


class InvalidInputError(SessionError):
    code = "invalid_input"


class FragmentFormulaError(SessionError):
    code = "parse_error"


class DuplicateFragmentError(SessionError):
    code = "duplicate_fragment"


class UnknownFragmentError(SessionError):
    code = "unknown_fragment"


class StaleResultError(SessionError):
    code = "stale_result"


class InvalidStateError(SessionError):
    code = "invalid_state"


class IndexOutOfRangeError(SessionError):
    code = "index_out_of_range"


class TranslateFailure(Exception):
    """Translate failed; ``state`` already records the attempt in history."""

    def __init__(self, message: str, state: "SessionState", cause: Exception):
        super().__init__(message)
        self.state = state
        self.cause = cause


def normalize_fragment(fragment: str) -> str:
    return " ".join(fragment.split())


def fragment_hash(fragment: str) -> str:
    digest = hashlib.sha256(normalize_fragment(fragment).encode("utf-8"))
    return digest.hexdigest()[:16]


def validate_fragment_formula(text: str) -> None:
    """Accept a full formula or one with a single leading binary-operator hole.

    ``-> b`` is legal: the user is telling the model how the fragment plugs
    into the surrounding formula.  Anything else that fails to parse is
    rejected before it can poison the prompt.
    """
    stripped = text.strip()
    if not stripped:
        raise FragmentFormulaError("formula text must be nonempty")
    try:
        parse(stripped)
        return
    except ParseError:
        pass
    try:
        tokens = tokenize(stripped)
    except ParseError as error:
        raise FragmentFormulaError(f"formula text does not tokenize: {error}") from error
    if tokens and tokens[0].kind in BINARY_TOKEN_KINDS:
        remainder = stripped[tokens[0].position + len(tokens[0].text):]
        try:
            parse(remainder)
            return
        except ParseError:
            pass
    raise FragmentFormulaError(
        f"not a formula or a leading-operator fragment: {stripped!r}"
    )


@dataclass(frozen=True)
class SubTranslation:
    fragment: str
    formula_text: str
    origin: str
    locked: bool
    confidence: float | None = None

    def __post_init__(self) -> None:
        if self.origin not in (ORIGIN_USER, ORIGIN_MODEL):
            raise ValueError(f"unknown origin: {self.origin!r}")
        if self.locked != (self.origin == ORIGIN_USER):
            raise ValueError("locked must mirror user origin")


@dataclass(frozen=True)
class SessionSettings:
    backend_id: str = "mock"
    template_id: str = "minimal"
    temperature: float = 0.2
    runs: int = 3

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")


@dataclass(frozen=True)
class HistoryEntry:
    timestamp: str
    action: str
    params: dict
    snapshot: dict


@dataclass(frozen=True)
class SessionState:
    id: str
    nl: str
    sub_translations: tuple[SubTranslation, ...]
    settings: SessionSettings
    status: str
    last_result: AggregatedResult | None
    history: tuple[HistoryEntry, ...]

    def find(self, fragment: str) -> SubTranslation | None:
        wanted = normalize_fragment(fragment)
        for entry in self.sub_translations:
            if normalize_fragment(entry.fragment) == wanted:
                return entry
        return None

    def locked_pairs(self) -> list[tuple[str, str]]:
        return [
            (entry.fragment, entry.formula_text)
            for entry in self.sub_translations
            if entry.locked
        ]


def _default_clock() -> str:
    return datetime.now(timezone.utc).isoformat()


def _default_id_factory() -> str:
    return secrets.token_hex(16)


def _core_json(state: SessionState) -> dict:
    """Everything except history: the payload snapshots and replays compare."""
    return {
        "id": state.id,
        "nl": state.nl,
        "subTranslations": [
            {
                "fragment": entry.fragment,
                "fragmentHash": fragment_hash(entry.fragment),
                "formulaText": entry.formula_text,
                "origin": entry.origin,
                "locked": entry.locked,
                "confidence": entry.confidence,
            }
            for entry in state.sub_translations
        ],
        "settings": {
            "backendId": state.settings.backend_id,
            "templateId": state.settings.template_id,
            "temperature": state.settings.temperature,
            "runs": state.settings.runs,
        },
        "status": state.status,
        "lastResult": result_to_json(state.last_result) if state.last_result else None,
    }


def session_to_json(state: SessionState) -> dict:
    payload = _core_json(state)
    payload["version"] = SCHEMA_VERSION
    payload["history"] = [
        {
            "timestamp": entry.timestamp,
            "action": entry.action,
            "params": entry.params,
            "snapshot": entry.snapshot,
        }
        for entry in state.history
    ]
    return payload


def session_from_json(payload: dict) -> SessionState:
    version = payload.get("version")
    if version != SCHEMA_VERSION:
        raise InvalidInputError(f"unsupported session schema version: {version!r}")
    settings = payload["settings"]
    return SessionState(
        id=payload["id"],
        nl=payload["nl"],
        sub_translations=tuple(
            SubTranslation(
                fragment=item["fragment"],
                formula_text=item["formulaText"],
                origin=item["origin"],
                locked=item["locked"],
                confidence=item.get("confidence"),
            )
            for item in payload["subTranslations"]
        ),
        settings=SessionSettings(
            backend_id=settings["backendId"],
            template_id=settings["templateId"],
            temperature=settings["temperature"],
            runs=settings["runs"],
        ),
        status=payload["status"],
        last_result=(
            result_from_json(payload["lastResult"]) if payload.get("lastResult") else None
        ),
        history=tuple(
            HistoryEntry(
                timestamp=item["timestamp"],
                action=item["action"],
                params=item["params"],
                snapshot=item["snapshot"],
            )
            for item in payload.get("history", [])
        ),
    )


class SessionEngine:
    """Pure state-transition logic wired to backend and template lookups."""

    def __init__(
        self,
        backend_provider: Callable[[str], CompletionBackend] | Mapping[str, CompletionBackend],
        template_provider: Callable[[str], PromptTemplate] | Mapping[str, PromptTemplate],
        clock: Callable[[], str] | None = None,
        id_factory: Callable[[], str] | None = None,
    ):
        if isinstance(backend_provider, Mapping):
            backends = dict(backend_provider)
            backend_provider = backends.__getitem__
        if isinstance(template_provider, Mapping):
            templates = dict(template_provider)
            template_provider = templates.__getitem__
        self._backend_for = backend_provider
        self._template_for = template_provider
        self._clock = clock or _default_clock
        self._new_id = id_factory or _default_id_factory

    def _stamp(self, state: SessionState, action: str, params: dict) -> SessionState:
        entry = HistoryEntry(
            timestamp=self._clock(),
            action=action,
            params=params,
            snapshot=_core_json(state),
        )
        return replace(state, history=state.history + (entry,))

    def new_session(
        self,
        nl: str,
        settings: SessionSettings | None = None,
        session_id: str | None = None,
    ) -> SessionState:
        if not nl.strip():
            raise InvalidInputError("natural language input must be nonempty")
        settings = settings or SessionSettings()
        state = SessionState(
            id=session_id or self._new_id(),
            nl=nl,
            sub_translations=(),
            settings=settings,
            status=STATUS_DRAFT,
            last_result=None,
            history=(),
        )
        params = {
            "id": state.id,
            "nl": nl,
            "settings": _core_json(state)["settings"],
        }
        return self._stamp(state, "create", params)

    def _require_editable(self, state: SessionState) -> None:
        if state.status == STATUS_APPROVED:
            raise InvalidStateError("session is approved; the formula is frozen")

    def translate(self, state: SessionState) -> SessionState:
        self._require_editable(state)
        if not state.nl.strip():
            raise InvalidInputError("natural language input must be nonempty")
        backend = self._backend_for(state.settings.backend_id)
        template = self._template_for(state.settings.template_id)
        prompt = compute_prompt(template, state.nl, state.locked_pairs())
        request = CompletionRequest(
            prompt=prompt,
            temperature=state.settings.temperature,
            stop_token=template.stop_token,
            runs=state.settings.runs,
        )
        try:
            batch = backend.complete(request)
            parsed = []
            for completion in batch.completions:
                try:
                    parsed.append(parse_completion(completion))
                except ResponseParseError:
                    continue
            result = aggregate(parsed, state.settings.runs)
        except (BackendError, NoCandidateError) as error:
            failed = self._stamp(state, "translate_failed", {"error": str(error)})
            raise TranslateFailure(str(error), failed, error) from error

        locked = [entry for entry in state.sub_translations if entry.locked]
        locked_keys = {normalize_fragment(entry.fragment) for entry in locked}
        model_entries = [
            SubTranslation(
                fragment=scores.fragment,
                formula_text=scores.best.text,
                origin=ORIGIN_MODEL,
                locked=False,
                confidence=scores.best.confidence,
            )
            for scores in result.sub_translations
            if normalize_fragment(scores.fragment) not in locked_keys
        ]
        updated = replace(
            state,
            sub_translations=tuple(locked) + tuple(model_entries),
            status=STATUS_TRANSLATED,
            last_result=result,
        )
        return self._stamp(updated, "translate", {})

    def add_sub_translation(
        self, state: SessionState, fragment: str, formula_text: str
    ) -> SessionState:
        self._require_editable(state)
        if not normalize_fragment(fragment):
            raise InvalidInputError("fragment must be nonempty")
        if state.find(fragment) is not None:
            raise DuplicateFragmentError(f"fragment already present: {fragment!r}")
        validate_fragment_formula(formula_text)
        entry = SubTranslation(
            fragment=fragment,
            formula_text=formula_text.strip(),
            origin=ORIGIN_USER,
            locked=True,
        )
        updated = replace(
            state,
            sub_translations=state.sub_translations + (entry,),
            status=STATUS_DRAFT,
        )
        return self._stamp(
            updated, "add", {"fragment": fragment, "formulaText": formula_text}
        )

    def edit_sub_translation(
        self, state: SessionState, fragment: str, formula_text: str
    ) -> SessionState:
        self._require_editable(state)
        existing = state.find(fragment)
        if existing is None:
            raise UnknownFragmentError(f"unknown fragment: {fragment!r}")
        validate_fragment_formula(formula_text)
        edited = SubTranslation(
            fragment=existing.fragment,
            formula_text=formula_text.strip(),
            origin=ORIGIN_USER,
            locked=True,
        )
        updated = replace(
            state,
            sub_translations=tuple(
                edited if entry is existing else entry
                for entry in state.sub_translations
            ),
            status=STATUS_DRAFT,
        )
        return self._stamp(
            updated, "edit", {"fragment": fragment, "formulaText": formula_text}
        )

    def delete_sub_translation(self, state: SessionState, fragment: str) -> SessionState:
        self._require_editable(state)
        existing = state.find(fragment)
        if existing is None:
            raise UnknownFragmentError(f"unknown fragment: {fragment!r}")
        updated = replace(
            state,
            sub_translations=tuple(
                entry for entry in state.sub_translations if entry is not existing
            ),
            status=STATUS_DRAFT,
        )
        return self._stamp(updated, "delete", {"fragment": fragment})

    def select_alternative(
        self, state: SessionState, target: str, index: int
    ) -> SessionState:
        self._require_editable(state)
        if state.last_result is None:
            raise StaleResultError("no translation result to select from")
        if state.status != STATUS_TRANSLATED:
            raise StaleResultError(
                "sub-translations changed since the last translate; translate again"
            )
        result = state.last_result
        if target == "final":
            candidates = [result.final, *result.final_alternatives]
            if not 0 <= index < len(candidates):
                raise IndexOutOfRangeError(
                    f"candidate index {index} out of range for the final formula"
                )
            chosen = candidates[index]
            rest = tuple(c for c in candidates if c is not chosen)
            updated_result = replace(result, final=chosen, final_alternatives=rest)
            updated = replace(state, last_result=updated_result)
            return self._stamp(updated, "select", {"target": "final", "index": index})

        wanted = normalize_fragment(target)
        scores_index = next(
            (
                position
                for position, scores in enumerate(result.sub_translations)
                if normalize_fragment(scores.fragment) == wanted
            ),
            None,
        )
        if scores_index is None:
            raise UnknownFragmentError(f"unknown fragment: {target!r}")
        scores = result.sub_translations[scores_index]
        candidates = [scores.best, *scores.alternatives]
        if not 0 <= index < len(candidates):
            raise IndexOutOfRangeError(
                f"candidate index {index} out of range for {target!r}"
            )
        chosen = candidates[index]
        rest = tuple(c for c in candidates if c is not chosen)
        updated_scores = FragmentScores(
            fragment=scores.fragment, best=chosen, alternatives=rest
        )
        updated_result = replace(
            result,
            sub_translations=tuple(
                updated_scores if position == scores_index else other
                for position, other in enumerate(result.sub_translations)
            ),
        )
        locked_entry = SubTranslation(
            fragment=scores.fragment,
            formula_text=chosen.text,
            origin=ORIGIN_USER,
            locked=True,
            confidence=chosen.confidence,
        )
        existing = state.find(scores.fragment)
        if existing is None:
            new_entries = state.sub_translations + (locked_entry,)
        else:
            new_entries = tuple(
                locked_entry if entry is existing else entry
                for entry in state.sub_translations
            )
        updated = replace(
            state, sub_translations=new_entries, last_result=updated_result
        )
        return self._stamp(updated, "select", {"target": target, "index": index})

    def approve(self, state: SessionState) -> SessionState:
        if state.status == STATUS_APPROVED:
            return state
        if state.status != STATUS_TRANSLATED or state.last_result is None:
            raise InvalidStateError("nothing to approve; translate first")
        updated = replace(state, status=STATUS_APPROVED)
        return self._stamp(updated, "approve", {})

    def apply_action(self, state: SessionState, action: str, params: dict) -> SessionState:
        """Apply one recorded history action; used for replay."""
        if action == "translate":
            return self.translate(state)
        if action == "translate_failed":
            try:
                return self.translate(state)
            except TranslateFailure as failure:
                return failure.state
        if action == "add":
            return self.add_sub_translation(state, params["fragment"], params["formulaText"])
        if action == "edit":
            return self.edit_sub_translation(state, params["fragment"], params["formulaText"])
        if action == "delete":
            return self.delete_sub_translation(state, params["fragment"])
        if action == "select":
            return self.select_alternative(state, params["target"], params["index"])
        if action == "approve":
            return self.approve(state)
        raise InvalidInputError(f"unknown history action: {action!r}")

    def replay(self, history: tuple[HistoryEntry, ...]) -> SessionState:
        """Rebuild a session by replaying its history from the create entry.

        With a deterministic backend the result's core state must match the
        live session's; this is the event-sourcing consistency check.
        """
        if not history or history[0].action != "create":
            raise InvalidInputError("history must start with a create entry")
        create = history[0].params
        settings = SessionSettings(
            backend_id=create["settings"]["backendId"],
            template_id=create["settings"]["templateId"],
            temperature=create["settings"]["temperature"],
            runs=create["settings"]["runs"],
        )
        state = self.new_session(create["nl"], settings, session_id=create["id"])
        for entry in history[1:]:
            state = self.apply_action(state, entry.action, entry.params)
        return state


def core_state_json(state: SessionState) -> dict:
    """Public name for the snapshot payload (state minus history)."""
    return _core_json(state)


class SessionStore:
    """One JSON file per session under a directory; writes are atomic."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not session_id or any(ch in session_id for ch in "/\\."):
            raise InvalidInputError(f"invalid session id: {session_id!r}")
        return self.directory / f"{session_id}.json"

    def save(self, state: SessionState) -> None:
        path = self._path(state.id)
        payload = json.dumps(session_to_json(state), indent=2, sort_keys=True)
        with self._lock:
            temp = path.with_suffix(".json.tmp")
            temp.write_text(payload, encoding="utf-8")
            os.replace(temp, path)

    def load(self, session_id: str) -> SessionState | None:
        path = self._path(session_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        return session_from_json(json.loads(text))

    def list_ids(self) -> list[str]:
        return sorted(path.stem for path in self.directory.glob("*.json"))
