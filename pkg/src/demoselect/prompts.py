"""Prompt rendering and completion parsing.

Templates are compiled into literal segments at construction, so payload
text containing placeholder-like substrings cannot corrupt the rendering.
Parsing maps a completion back to a class index by the first verbalizer
occurring in the output; no match yields the ABSTAIN sentinel, which scoring
counts as incorrect.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from importlib import resources

from .corpus import Example, LabelMap
from .errors import FormatError, ValidationError
from .validation import check_nonempty_str

# Returned by parse_prediction when no verbalizer occurs in the output.
ABSTAIN = -1

BUILTIN_TEMPLATES = ("generic", "sentiment", "subjectivity", "topic", "nli")


def _split_pattern(pattern: str, fields: Sequence[str], name: str) -> tuple:
    """Split a pattern into literal/field segments; each field exactly once."""
    segments: list[object] = [pattern]
    for field in fields:
        token = "{" + field + "}"
        next_segments: list[object] = []
        count = 0
        for seg in segments:
            if not isinstance(seg, str):
                next_segments.append(seg)
                continue
            parts = seg.split(token)
            count += len(parts) - 1
            for i, part in enumerate(parts):
                if i:
                    next_segments.append((field,))
                if part:
                    next_segments.append(part)
        if count != 1:
            raise ValidationError(
                f"{name} must contain {token} exactly once, found {count}"
            )
        segments = next_segments
    return tuple(segments)


def _render(segments: tuple, values: dict[str, str]) -> str:
    return "".join(seg if isinstance(seg, str) else values[seg[0]] for seg in segments)


@dataclass(frozen=True)
class PromptTemplate:
    """Patterns for rendering demonstrations and the final query.

    ``demo_pattern`` must use ``{text}`` and ``{verbalizer}`` exactly once
    each; ``query_pattern`` uses ``{text}`` exactly once.  Validation happens
    here, at load time, never during rendering.
    """

    task_name: str
    demo_pattern: str
    query_pattern: str
    separator: str = "\n\n"
    instruction: str | None = None

    def __post_init__(self):
        check_nonempty_str(self.task_name, "task_name")
        object.__setattr__(
            self,
            "_demo_segments",
            _split_pattern(self.demo_pattern, ("text", "verbalizer"), "demo_pattern"),
        )
        object.__setattr__(
            self,
            "_query_segments",
            _split_pattern(self.query_pattern, ("text",), "query_pattern"),
        )

    def render_demo(self, text: str, verbalizer: str) -> str:
        return _render(self._demo_segments, {"text": text, "verbalizer": verbalizer})

    def render_query(self, text: str) -> str:
        return _render(self._query_segments, {"text": text})


def template_from_dict(data: dict, source: str = "<dict>") -> PromptTemplate:
    try:
        return PromptTemplate(
            task_name=data["task_name"],
            demo_pattern=data["demo_pattern"],
            query_pattern=data["query_pattern"],
            separator=data.get("separator", "\n\n"),
            instruction=data.get("instruction"),
        )
    except KeyError as exc:
        raise FormatError(f"template is missing field {exc}", path=source) from None
    except ValidationError as exc:
        raise FormatError(str(exc), path=source) from None


def load_template(path: str) -> PromptTemplate:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot open template: {exc}", path=path) from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc.msg}", path=path) from None
    if not isinstance(data, dict):
        raise FormatError("template file must hold a JSON object", path=path)
    return template_from_dict(data, source=path)


def builtin_template(name: str) -> PromptTemplate:
    """Load one of the packaged default templates by task family name."""
    if name not in BUILTIN_TEMPLATES:
        raise ValidationError(
            f"unknown builtin template {name!r}; choose from {', '.join(BUILTIN_TEMPLATES)}"
        )
    data = json.loads(
        resources.files("demoselect").joinpath(f"templates/{name}.json").read_text("utf-8")
    )
    return template_from_dict(data, source=f"builtin:{name}")


def render_prompt(
    template: PromptTemplate,
    demos: Sequence[tuple[Example, str]],
    query: Example,
    allow_zero_shot: bool = False,
) -> str:
    """Assemble the full prompt string, byte-deterministically.

    Parts are the optional instruction, each rendered demonstration in the
    given order, and the rendered query, joined by the template separator.
    """
    if not demos and not allow_zero_shot:
        raise ValidationError("no demonstrations given and zero-shot not allowed")
    parts = []
    if template.instruction:
        parts.append(template.instruction)
    for example, verbalizer in demos:
        parts.append(template.render_demo(example.text, verbalizer))
    parts.append(template.render_query(query.text))
    return template.separator.join(parts)


def parse_prediction(raw_output: str, label_map: LabelMap) -> int:
    """Map LLM output to a class index by first verbalizer occurrence.

    Matching is case-insensitive on the trimmed output.  When two
    verbalizers start at the same position the longer one wins.  Returns
    ABSTAIN when nothing matches; this never raises.
    """
    haystack = raw_output.strip().lower()
    best: tuple[int, int, int] | None = None
    for cls in label_map.classes:
        needle = cls.verbalizer.lower()
        pos = haystack.find(needle)
        if pos < 0:
            continue
        key = (pos, -len(needle), cls.index)
        if best is None or key < best:
            best = key
    return best[2] if best is not None else ABSTAIN
