"""Source text -> :class:`~onesource.nodes.Document`."""

from __future__ import annotations

import json

from ..diagnostics import Diagnostic, error, warning
from ..nodes import Document, Fragment, SlideType, SourceSpan, TagSet
from ..tags import validate_tagset
from .blocks import parse_blocks
from .cells import RawFragment, split_cells
from .directives import parse_directive
from .frontmatter import parse_frontmatter
from .inlines import parse_inlines

__all__ = [
    "RawFragment",
    "decode_cell_metadata",
    "parse_blocks",
    "parse_directive",
    "parse_frontmatter",
    "parse_inlines",
    "parse_source",
    "split_cells",
]

_CELL_KEYS = {"tags", "slide"}


def decode_cell_metadata(
    raw: RawFragment, source: str = "<string>"
) -> tuple[TagSet, SlideType | None, list[Diagnostic]]:
    if raw.tags_json is None:
        return TagSet(), None, []
    line = raw.break_line or raw.span.start_line
    span = SourceSpan(line, line)
    try:
        meta = json.loads(raw.tags_json)
    except json.JSONDecodeError as exc:
        return TagSet(), None, [error("bad-cell-metadata", f"cell metadata is not valid JSON: {exc.msg}", span, source)]
    if not isinstance(meta, dict):
        return TagSet(), None, [error("bad-cell-metadata", "cell metadata must be a JSON object", span, source)]

    diagnostics: list[Diagnostic] = []
    for key in sorted(set(meta) - _CELL_KEYS):
        diagnostics.append(warning("bad-cell-metadata", f"ignoring unknown cell metadata key {key!r}", span, source))

    tags = TagSet()
    raw_tags = meta.get("tags", [])
    if isinstance(raw_tags, str):
        raw_tags = [raw_tags]
    if not isinstance(raw_tags, list) or not all(isinstance(t, str) for t in raw_tags):
        diagnostics.append(error("bad-cell-metadata", "\"tags\" must be a list of strings", span, source))
    else:
        tags, diags = validate_tagset(raw_tags, span, source)
        diagnostics.extend(diags)

    slide_type = None
    if "slide" in meta:
        try:
            slide_type = SlideType(meta["slide"])
        except ValueError:
            diagnostics.append(
                error(
                    "bad-slide-type",
                    f"slide type {meta['slide']!r} is not one of {[s.value for s in SlideType]}",
                    span,
                    source,
                )
            )
    return tags, slide_type, diagnostics


def parse_source(text: str, source_name: str = "<string>") -> tuple[Document, list[Diagnostic]]:
    """Parse a whole source file.

    Always returns a document; problems are reported as diagnostics.
    """
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    diagnostics: list[Diagnostic] = []
    frontmatter, body, diags = parse_frontmatter(text, source_name)
    diagnostics.extend(diags)
    first_line = 1 + text[: len(text) - len(body)].count("\n")

    raw_fragments, diags = split_cells(body, first_line, source_name)
    diagnostics.extend(diags)

    fragments = []
    for raw in raw_fragments:
        tags, slide_type, diags = decode_cell_metadata(raw, source_name)
        diagnostics.extend(diags)
        blocks, diags = parse_blocks(raw.text, raw.span.start_line, source_name)
        diagnostics.extend(diags)
        if blocks:
            fragments.append(Fragment(blocks, raw.span, tags, slide_type))

    unique = list(dict.fromkeys(diagnostics))
    return Document(frontmatter, tuple(fragments), source_name), unique
