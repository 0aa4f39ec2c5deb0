"""Few-shot prompt templates and interactive prompt assembly.

A template file is plain text: a header of free-form instruction lines,
then worked examples.  Each example uses fixed line markers, in order:

    Natural Language: <one line>
    Given translations: <one-line dictionary, {} when empty>
    Explanation: <free text, may span lines>
    Explanation dictionary: <one-line dictionary>
    So, the final LTL translation is: <formula>.
    FINISH

The stop token line ends the example.  The interactive prompt is the
serialized template followed by a tail holding the live sentence and the
locked sub-translations, stopping right after ``Explanation:`` so the
model continues from there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dicttext import parse_pairs, render_pairs
from .ltl import ParseError, parse

MARKER_NL = "Natural Language:"
MARKER_GIVEN = "Given translations:"
MARKER_EXPLANATION = "Explanation:"
MARKER_DICTIONARY = "Explanation dictionary:"
MARKER_FINAL = "So, the final LTL translation is:"
DEFAULT_STOP_TOKEN = "FINISH"

# Shipped templates whose formulas are not LTL, so load-time formula
# validation is skipped for them (config may extend this set).
UNVALIDATED_TEMPLATE_IDS = frozenset({"stl"})

_DATA_PACKAGE = "ltlkit.data.templates"


class TemplateError(ValueError):
    """A template document violates the file format contract."""


@dataclass(frozen=True)
class FewShotExample:
    natural_language: str
    given_translations: tuple[tuple[str, str], ...]
    explanation: str
    explanation_dictionary: tuple[tuple[str, str], ...]
    final_translation: str


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    header: str
    examples: tuple[FewShotExample, ...]
    stop_token: str = DEFAULT_STOP_TOKEN

    def __post_init__(self) -> None:
        if not self.examples:
            raise TemplateError("template must contain at least one example")
        if not self.header.strip():
            raise TemplateError("template must contain a header")
        if not self.stop_token:
            raise TemplateError("stop token must be nonempty")


def serialize_example(example: FewShotExample, stop_token: str = DEFAULT_STOP_TOKEN) -> str:
    lines = [
        f"{MARKER_NL} {example.natural_language}",
        f"{MARKER_GIVEN} {render_pairs(example.given_translations)}",
        f"{MARKER_EXPLANATION} {example.explanation}",
        f"{MARKER_DICTIONARY} {render_pairs(example.explanation_dictionary)}",
        f"{MARKER_FINAL} {example.final_translation}.",
        stop_token,
    ]
    return "\n".join(lines)


def serialize_template(template: PromptTemplate) -> str:
    blocks = [template.header.rstrip("\n")]
    for example in template.examples:
        blocks.append(serialize_example(example, template.stop_token))
    return "\n\n".join(blocks) + "\n"


def _parse_example(block: str, source_name: str) -> FewShotExample:
    lines = [line for line in block.split("\n")]
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or not lines[0].startswith(MARKER_NL):
        raise TemplateError(f"{source_name}: example does not start with {MARKER_NL!r}")
    nl = lines[0][len(MARKER_NL):].strip()
    if len(lines) < 2 or not lines[1].startswith(MARKER_GIVEN):
        raise TemplateError(f"{source_name}: example for {nl!r} lacks {MARKER_GIVEN!r}")
    given, given_warnings = parse_pairs(lines[1][len(MARKER_GIVEN):])
    if len(lines) < 3 or not lines[2].startswith(MARKER_EXPLANATION):
        raise TemplateError(f"{source_name}: example for {nl!r} lacks {MARKER_EXPLANATION!r}")
    explanation_lines = [lines[2][len(MARKER_EXPLANATION):].strip()]
    index = 3
    while index < len(lines) and not lines[index].startswith(MARKER_DICTIONARY):
        explanation_lines.append(lines[index])
        index += 1
    if index >= len(lines):
        raise TemplateError(f"{source_name}: example for {nl!r} lacks {MARKER_DICTIONARY!r}")
    dictionary, dict_warnings = parse_pairs(lines[index][len(MARKER_DICTIONARY):])
    index += 1
    if index >= len(lines) or not lines[index].startswith(MARKER_FINAL):
        raise TemplateError(f"{source_name}: example for {nl!r} lacks {MARKER_FINAL!r}")
    final = lines[index][len(MARKER_FINAL):].strip()
    if final.endswith("."):
        final = final[:-1].rstrip()
    if not final:
        raise TemplateError(f"{source_name}: example for {nl!r} has an empty final translation")
    if any(line.strip() for line in lines[index + 1:]):
        raise TemplateError(f"{source_name}: example for {nl!r} has text after the final translation")
    if given_warnings or dict_warnings:
        problem = (given_warnings + dict_warnings)[0]
        raise TemplateError(f"{source_name}: example for {nl!r}: {problem}")
    return FewShotExample(
        natural_language=nl,
        given_translations=tuple(given),
        explanation="\n".join(explanation_lines).rstrip(),
        explanation_dictionary=tuple(dictionary),
        final_translation=final,
    )


def load_template(
    document: str,
    template_id: str,
    stop_token: str = DEFAULT_STOP_TOKEN,
    validate: bool | None = None,
    source_name: str = "template",
) -> PromptTemplate:
    """Parse a template document.

    ``validate`` controls load-time formula checking of each example's
    final translation; the default validates unless the id is in
    UNVALIDATED_TEMPLATE_IDS (templates for other logics).
    """
    if validate is None:
        validate = template_id not in UNVALIDATED_TEMPLATE_IDS
    first_marker = document.find(MARKER_NL)
    if first_marker < 0:
        raise TemplateError(f"{source_name}: no {MARKER_NL!r} example marker found")
    header = document[:first_marker].strip("\n")
    if not header.strip():
        raise TemplateError(f"{source_name}: missing header before the first example")
    body = document[first_marker:]
    examples = []
    block_lines: list[str] = []
    for line in body.split("\n"):
        if line.strip() == stop_token:
            examples.append(_parse_example("\n".join(block_lines), source_name))
            block_lines = []
        else:
            block_lines.append(line)
    if any(line.strip() for line in block_lines):
        raise TemplateError(
            f"{source_name}: trailing example not terminated by {stop_token!r}"
        )
    if not examples:
        raise TemplateError(f"{source_name}: no examples found")
    if validate:
        for example in examples:
            try:
                parse(example.final_translation)
            except ParseError as error:
                raise TemplateError(
                    f"{source_name}: final translation of "
                    f"{example.natural_language!r} does not parse: {error}"
                ) from error
    return PromptTemplate(
        id=template_id,
        header=header,
        examples=tuple(examples),
        stop_token=stop_token,
    )


def load_template_file(path: str | Path, template_id: str | None = None, **kwargs) -> PromptTemplate:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return load_template(
        text,
        template_id if template_id is not None else path.stem,
        source_name=str(path),
        **kwargs,
    )


def packaged_template_ids() -> list[str]:
    ids = []
    for entry in resources.files(_DATA_PACKAGE).iterdir():
        if entry.name.endswith(".txt"):
            ids.append(entry.name[: -len(".txt")])
    return sorted(ids)


def load_packaged_template(template_id: str) -> PromptTemplate:
    entry = resources.files(_DATA_PACKAGE) / f"{template_id}.txt"
    if not entry.is_file():
        raise TemplateError(f"unknown template: {template_id!r}")
    return load_template(
        entry.read_text(encoding="utf-8"),
        template_id,
        source_name=f"{template_id}.txt",
    )


def compute_prompt(template: PromptTemplate, nl: str, given) -> str:
    """Assemble the full prompt for one translate call.

    ``given`` is an ordered mapping or pair list of locked sub-translations;
    they land verbatim on the tail's given-translations line.  The prompt
    ends right after the explanation marker.
    """
    if not nl.strip():
        raise ValueError("natural language input must be nonempty")
    tail = (
        f"{MARKER_NL} {nl.strip()}\n"
        f"{MARKER_GIVEN} {render_pairs(given)}\n"
        f"{MARKER_EXPLANATION}"
    )
    return serialize_template(template) + "\n" + tail


def interactive_tail(prompt: str) -> str:
    """The live part of a prompt: its last NL line plus the given line.

    Mock backends match rules against this slice so scripted completions
    key off the user's sentence and locked sub-translations, not off the
    few-shot examples.
    """
    nl_start = prompt.rfind(MARKER_NL)
    if nl_start < 0:
        return prompt
    tail = prompt[nl_start:]
    lines = tail.split("\n")
    return "\n".join(lines[:2])
