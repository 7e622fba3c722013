"""ipynb (nbformat 4.5) emission."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
import hashlib
import json
import re
from typing import Any

from .assets import asset_url
from .bibliography import CitationMap, format_reference
from .nodes import (
    Admonition,
    Bibliography,
    Block,
    BlockQuote,
    CiteRole,
    CodeBlock,
    CodeCell,
    CodeSpan,
    Document,
    Emph,
    EqRole,
    Figure,
    Heading,
    Image,
    Inline,
    Link,
    ListBlock,
    MathBlock,
    MathInline,
    Paragraph,
    RefRole,
    SlideType,
    Strong,
    Table,
    Text,
    ThematicBreak,
)
from .xref import LabelTable

NBFORMAT = 4
NBFORMAT_MINOR = 5

_ESCAPE = re.compile(r"([\\`*\[\]$<])")
_WORD_UNDERSCORE = re.compile(r"(?<![A-Za-z0-9])_|_(?![A-Za-z0-9])")


@dataclass
class Cell:
    cell_type: str
    source: str
    id: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "cell_type": self.cell_type,
            "id": self.id,
            "metadata": self.metadata,
            "source": self.source.splitlines(keepends=True),
        }
        if self.cell_type == "code":
            data["execution_count"] = None
            data["outputs"] = []
        return data


@dataclass
class Notebook:
    cells: list[Cell] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    nbformat: int = NBFORMAT
    nbformat_minor: int = NBFORMAT_MINOR


# -- markdown serialisation ------------------------------------------------


def _escape_text(text: str) -> str:
    text = _ESCAPE.sub(r"\\\1", text)
    return _WORD_UNDERSCORE.sub(r"\\_", text)


def _code_span(text: str) -> str:
    longest = max((len(m) for m in re.findall(r"`+", text)), default=0)
    ticks = "`" * (longest + 1)
    pad = " " if text.startswith("`") or text.endswith("`") or (text.startswith(" ") and text.endswith(" ") and text.strip()) else ""
    return f"{ticks}{pad}{text}{pad}{ticks}"


def _fence(language: str | None, source: str) -> str:
    longest = max((len(m) for m in re.findall(r"^[ \t]*(`{3,})", source, re.M)), default=0)
    ticks = "`" * max(3, longest + 1)
    return f"{ticks}{language or ''}\n{source}\n{ticks}" if source else f"{ticks}{language or ''}\n{ticks}"


class MarkdownWriter:
    """Serialise AST nodes back to plain CommonMark plus ``$`` math."""

    def __init__(self, source_name: str = "", labels: LabelTable | None = None, citations: CitationMap | None = None) -> None:
        self.source_name = source_name
        self.labels = labels
        self.citations = citations

    def inlines(self, nodes: Iterable[Inline]) -> str:
        return "".join(self.inline(n) for n in nodes)

    def inline(self, node: Inline) -> str:
        if isinstance(node, Text):
            return _escape_text(node.text)
        if isinstance(node, Emph):
            return f"*{self.inlines(node.children)}*"
        if isinstance(node, Strong):
            return f"**{self.inlines(node.children)}**"
        if isinstance(node, CodeSpan):
            return _code_span(node.text)
        if isinstance(node, Link):
            return f"[{self.inlines(node.children)}](<{node.url}>)"
        if isinstance(node, Image):
            return f"![{_escape_text(node.alt)}](<{node.url}>)"
        if isinstance(node, MathInline):
            return f"${node.latex}$"
        if isinstance(node, CiteRole):
            text = self.citations.render(node.keys) if self.citations else "(" + "; ".join(node.keys) + ")"
            return _escape_text(text)
        if isinstance(node, (RefRole, EqRole)):
            return "??"
        raise TypeError(f"unknown inline {node!r}")

    def blocks(self, blocks: Iterable[Block]) -> str:
        return "\n\n".join(s for s in (self.block(b) for b in blocks) if s)

    def block(self, block: Block) -> str:
        if isinstance(block, Heading):
            return "#" * block.level + " " + self.inlines(block.children)
        if isinstance(block, Paragraph):
            return self.inlines(block.children)
        if isinstance(block, (CodeBlock, CodeCell)):
            return _fence(block.language, block.source)
        if isinstance(block, MathBlock):
            number = self.labels.number_for(self.source_name, block) if self.labels and block.label else None
            tag = f" \\tag{{{number}}}" if number else ""
            return f"$$\n{block.latex}{tag}\n$$"
        if isinstance(block, Figure):
            image = f"![{_escape_text(block.alt)}](<{asset_url(self.source_name, block.target)}>)"
            number = self.labels.number_for(self.source_name, block) if self.labels else None
            caption = self.inlines(block.caption)
            if number:
                caption = f"Figure {number}: {caption}" if caption else f"Figure {number}"
            return f"{image}\n\n{caption}" if caption else image
        if isinstance(block, Admonition):
            title = block.title or block.kind.capitalize()
            body = f"**{_escape_text(title)}**"
            inner = self.blocks(block.children)
            if inner:
                body += "\n\n" + inner
            return self.quote(body)
        if isinstance(block, Bibliography):
            refs = self.citations.references if self.citations else []
            return "\n".join(f"- {_escape_text(format_reference(e))}" for e in refs)
        if isinstance(block, ListBlock):
            return self.list_block(block)
        if isinstance(block, BlockQuote):
            return self.quote(self.blocks(block.children))
        if isinstance(block, Table):
            def row(cells: Iterable[tuple[Inline, ...]]) -> str:
                return "| " + " | ".join(self.inlines(c).replace("|", "\\|") for c in cells) + " |"

            lines = [row(block.header), "|" + "|".join("---" for _ in block.header) + "|"]
            lines += [row(r) for r in block.rows]
            return "\n".join(lines)
        if isinstance(block, ThematicBreak):
            return "***"
        raise TypeError(f"unknown block {block!r}")

    @staticmethod
    def quote(text: str) -> str:
        return "\n".join(("> " + line) if line else ">" for line in text.split("\n"))

    def list_block(self, block: ListBlock) -> str:
        out = []
        for n, item in enumerate(block.items):
            marker = f"{block.start + n}. " if block.ordered else "- "
            body = self.blocks(item.children)
            lines = body.split("\n") if body else [""]
            pad = " " * len(marker)
            text = marker + lines[0] + "".join("\n" + (pad + l if l else "") for l in lines[1:])
            out.append(text.rstrip())
        return ("\n\n" if not block.tight else "\n").join(out)


# -- cells ----------------------------------------------------------------


def cell_id(index: int, source: str, length: int = 8) -> str:
    return hashlib.sha256(f"{index}\x00{source}".encode("utf-8")).hexdigest()[:length]


def to_notebook(
    document: Document,
    *,
    kernel_name: str = "python3",
    kernel_language: str = "python",
    labels: LabelTable | None = None,
    citations: CitationMap | None = None,
) -> Notebook:
    """Convert a notebook-filtered, reference-resolved document.

    Each fragment yields one markdown cell holding all of its prose (placed
    where its first prose block sits) and one code cell per top-level
    code-cell directive.
    """
    writer = MarkdownWriter(document.source_name, labels, citations)
    cells: list[Cell] = []
    for fragment in document.fragments:
        prose = [b for b in fragment.blocks if not isinstance(b, CodeCell)]
        markdown = writer.blocks(prose)
        frag_cells: list[Cell] = []
        placed = False
        for block in fragment.blocks:
            if isinstance(block, CodeCell):
                tags = (fragment.tags | block.tags).as_list()
                frag_cells.append(Cell("code", block.source, metadata={"tags": tags} if tags else {}))
            elif not placed:
                placed = True
                if markdown:
                    tags = fragment.tags.as_list()
                    frag_cells.append(Cell("markdown", markdown, metadata={"tags": tags} if tags else {}))
        if fragment.slide_type is not None:
            for k, cell in enumerate(frag_cells):
                keep = k == 0 or fragment.slide_type in (SlideType.NOTES, SlideType.SKIP)
                cell.metadata["slideshow"] = {"slide_type": fragment.slide_type.value if keep else "-"}
        cells.extend(frag_cells)

    seen: set[str] = set()
    for index, cell in enumerate(cells):
        length = 8
        ident = cell_id(index, cell.source, length)
        while ident in seen:
            length += 4
            ident = cell_id(index, cell.source, length)
        seen.add(ident)
        cell.id = ident

    metadata = {
        "kernelspec": {"display_name": kernel_name, "language": kernel_language, "name": kernel_name},
        "language_info": {"name": kernel_language},
    }
    return Notebook(cells, metadata)


def notebook_json(notebook: Notebook) -> dict[str, Any]:
    return {
        "cells": [c.to_json() for c in notebook.cells],
        "metadata": notebook.metadata,
        "nbformat": notebook.nbformat,
        "nbformat_minor": notebook.nbformat_minor,
    }


def serialize_notebook(notebook: Notebook) -> bytes:
    """Canonical JSON: sorted keys, one-space indent, LF newlines, trailing newline."""
    text = json.dumps(notebook_json(notebook), indent=1, sort_keys=True, ensure_ascii=False)
    return (text + "\n").encode("utf-8")
