from __future__ import annotations

import re
from typing import Any

import yaml

from ..diagnostics import Diagnostic, error
from ..nodes import FrontMatter, SourceSpan

_KEY_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.-]*)[ \t]*:(?:[ \t]+(.*?))?[ \t]*$")
_DELIM = re.compile(r"^---[ \t]*$")


def _scalar(raw: str) -> Any:
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError:
        return raw
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, list) and all(isinstance(v, (str, int, float)) for v in value):
        return [str(v) for v in value]
    return raw


def parse_frontmatter(text: str, source: str = "<string>") -> tuple[FrontMatter, str, list[Diagnostic]]:
    """Split a leading ``---`` block off ``text``.

    Returns the frontmatter, the remaining body (a suffix of ``text``) and any
    diagnostics.  A malformed header yields an empty FrontMatter and the body
    after the closing delimiter.
    """
    lines = text.split("\n")
    if not lines or not _DELIM.match(lines[0]):
        return FrontMatter(), text, []

    close = next((i for i in range(1, len(lines)) if _DELIM.match(lines[i])), None)
    if close is None:
        return FrontMatter(), text, [
            error("bad-frontmatter", "frontmatter opened with '---' but never closed", SourceSpan(1, 1), source)
        ]
    remainder = "\n".join(lines[close + 1 :])

    values: dict[str, Any] = {}
    raw_values: dict[str, str] = {}
    last_key: str | None = None
    for i in range(1, close):
        line = lines[i]
        lineno = i + 1
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line[0] in " \t" or line.lstrip().startswith("- "):
            # nested structure: kept verbatim under the owning key
            if last_key is None:
                return FrontMatter(), remainder, [
                    error("bad-frontmatter", "indented line without a key", SourceSpan(lineno, lineno), source)
                ]
            raw_values[last_key] += "\n" + line
            values[last_key] = raw_values[last_key]
            continue
        m = _KEY_LINE.match(line)
        if not m:
            return FrontMatter(), remainder, [
                error("bad-frontmatter", f"expected 'key: value', got {line!r}", SourceSpan(lineno, lineno), source)
            ]
        key, raw = m.group(1), m.group(2) or ""
        if key in values:
            return FrontMatter(), remainder, [
                error("bad-frontmatter", f"duplicate key {key!r}", SourceSpan(lineno, lineno), source)
            ]
        values[key] = _scalar(raw) if raw else ""
        raw_values[key] = raw
        last_key = key

    # a nested block under a key collapses to opaque text; sequences under
    # title/authors are still useful, so try to decode those
    for key in ("authors", "author"):
        if isinstance(values.get(key), str) and values[key].startswith("\n"):
            decoded = _scalar(values[key])
            values[key] = decoded if isinstance(decoded, list) else values[key].strip()

    title = values.pop("title", None)
    authors: list[str] = []
    for key in ("authors", "author"):
        value = values.pop(key, None)
        if isinstance(value, list):
            authors.extend(value)
        elif value not in (None, ""):
            authors.extend(a.strip() for a in str(value).split(" and ") if a.strip())
    return (
        FrontMatter(title=None if title in (None, "") else str(title), authors=tuple(authors), extra=values),
        remainder,
        [],
    )
