from __future__ import annotations

import re

from ..diagnostics import Diagnostic, error, warning
from ..nodes import (
    LABEL_RE,
    Admonition,
    Bibliography,
    Block,
    CodeBlock,
    CodeCell,
    Figure,
    MathBlock,
    SourceSpan,
    TagSet,
)
from ..tags import validate_tagset
from .inlines import parse_inlines

ADMONITIONS = {
    "note",
    "warning",
    "tip",
    "hint",
    "important",
    "caution",
    "attention",
    "danger",
    "error",
    "seealso",
}
DIRECTIVES = ADMONITIONS | {"admonition", "math", "figure", "code-cell", "bibliography"}

_OPTION = re.compile(r"^:([\w-]+):(?:[ \t]+(.*?))?[ \t]*$")


def parse_options(options_text: str) -> dict[str, str]:
    options: dict[str, str] = {}
    for line in options_text.splitlines():
        m = _OPTION.match(line.strip())
        if m:
            options[m.group(1)] = m.group(2) or ""
    return options


def parse_list_option(value: str) -> list[str]:
    """``[a, "b"]`` or ``a, b`` -> ['a', 'b']."""
    value = value.strip()
    if value.startswith("[") and value.endswith("]"):
        value = value[1:-1]
    return [v.strip().strip("'\"") for v in value.split(",") if v.strip().strip("'\"")]


def parse_directive(
    name: str,
    argument: str,
    options_text: str,
    body: str,
    *,
    span: SourceSpan = SourceSpan(1, 1),
    body_line: int | None = None,
    source: str = "<string>",
    lines: list[tuple[int, str]] | None = None,
) -> tuple[Block | None, list[Diagnostic]]:
    """Turn a fenced ``{name}`` directive into a block.

    Returns ``None`` for the block when a required argument is missing.
    Unknown directives keep their body as a plain code block.
    """
    diagnostics: list[Diagnostic] = []
    options = parse_options(options_text)
    body_line = span.start_line + 1 if body_line is None else body_line
    if lines is None:
        lines = [(body_line + k, t) for k, t in enumerate(body.split("\n"))] if body else []

    def label_option(key: str) -> str | None:
        label = options.get(key)
        if label is None:
            return None
        if not LABEL_RE.fullmatch(label):
            diagnostics.append(error("bad-label", f"label {label!r} must match [a-zA-Z0-9_-]+", span, source))
            return None
        return label

    if name == "math":
        return MathBlock(body.strip(), span, label_option("label")), diagnostics

    if name == "figure":
        if not argument:
            diagnostics.append(error("missing-argument", "figure directive needs an image path", span, source))
            return None, diagnostics
        caption, diags = parse_inlines(body.strip(), _first_content_line(lines, body_line), source)
        diagnostics.extend(diags)
        return Figure(argument, options.get("alt", ""), caption, span, label_option("name")), diagnostics

    if name == "code-cell":
        if not argument:
            diagnostics.append(error("missing-argument", "code-cell directive needs a language", span, source))
            return CodeBlock(None, body, span), diagnostics
        tags = TagSet()
        if "tags" in options:
            tags, diags = validate_tagset(parse_list_option(options["tags"]), span, source)
            diagnostics.extend(diags)
        extra = {k: v for k, v in options.items() if k != "tags"}
        return CodeCell(argument.split()[0], body, span, tags, extra), diagnostics

    if name in ADMONITIONS or name == "admonition":
        if name == "admonition" and not argument:
            diagnostics.append(error("missing-argument", "admonition directive needs a title", span, source))
            return None, diagnostics
        from .blocks import parse_lines

        children = parse_lines(lines, source, diagnostics)
        return Admonition(name, children, span, argument or None), diagnostics

    if name == "bibliography":
        return Bibliography(span), diagnostics

    diagnostics.append(warning("unknown-directive", f"unknown directive {{{name}}}; kept as code", span, source))
    return CodeBlock(None, body, span), diagnostics


def _first_content_line(lines: list[tuple[int, str]], default: int) -> int:
    for lineno, text in lines:
        if text.strip():
            return lineno
    return default
