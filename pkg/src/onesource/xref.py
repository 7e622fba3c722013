"""Numbering of sections, figures and equations, and {ref}/{eq} resolution."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic, error, warning
from .nodes import (
    Block,
    Document,
    EqRole,
    Figure,
    Heading,
    Inline,
    Link,
    MathBlock,
    RefRole,
    SourceSpan,
    Text,
    document_blocks,
    map_document,
    plain_text,
)


class LabelKind(str, Enum):
    SECTION = "section"
    FIGURE = "figure"
    EQUATION = "equation"


@dataclass(frozen=True, slots=True)
class LabelEntry:
    label: str
    kind: LabelKind
    number: str
    title: tuple[Inline, ...]
    source_name: str
    span: SourceSpan

    @property
    def anchor(self) -> str:
        return self.label


@dataclass
class LabelTable:
    entries: dict[str, LabelEntry] = field(default_factory=dict)
    # (source, kind, start line) -> number, for labelled and unlabelled objects alike
    numbers: dict[tuple[str, LabelKind, int], str] = field(default_factory=dict)

    def __contains__(self, label: str) -> bool:
        return label in self.entries

    def __getitem__(self, label: str) -> LabelEntry:
        return self.entries[label]

    def get(self, label: str) -> LabelEntry | None:
        return self.entries.get(label)

    def number_for(self, source_name: str, block: Block) -> str | None:
        kind = _kind_of(block)
        if kind is None:
            return None
        return self.numbers.get((source_name, kind, block.span.start_line))


def _kind_of(block: Block) -> LabelKind | None:
    if isinstance(block, Heading):
        return LabelKind.SECTION
    if isinstance(block, Figure):
        return LabelKind.FIGURE
    if isinstance(block, MathBlock):
        return LabelKind.EQUATION
    return None


def collect_labels(documents: Iterable[Document]) -> tuple[LabelTable, list[Diagnostic]]:
    """Number H1/H2 headings, figures and labelled equations across all documents in build order."""
    table = LabelTable()
    diagnostics: list[Diagnostic] = []
    h1 = h2 = figures = equations = 0
    for doc in documents:
        for block in document_blocks(doc):
            number: str | None = None
            title: tuple[Inline, ...] = ()
            if isinstance(block, Heading):
                if block.level == 1:
                    h1, h2 = h1 + 1, 0
                    number = str(h1)
                elif block.level == 2:
                    h2 += 1
                    number = f"{h1}.{h2}"
                title = block.children
            elif isinstance(block, Figure):
                figures += 1
                number = str(figures)
                title = block.caption
            elif isinstance(block, MathBlock) and block.label:
                equations += 1
                number = str(equations)
            else:
                continue
            kind = _kind_of(block)
            assert kind is not None
            if number is not None:
                table.numbers[(doc.source_name, kind, block.span.start_line)] = number
            label = getattr(block, "label", None)
            if not label:
                continue
            if label in table.entries:
                first = table.entries[label]
                diagnostics.append(
                    error(
                        "duplicate-label",
                        f"label {label!r} already defined at {first.source_name}:{first.span.start_line}",
                        block.span,
                        doc.source_name,
                    )
                )
                continue
            table.entries[label] = LabelEntry(label, kind, number or "", title, doc.source_name, block.span)
    return table, diagnostics


def reference_text(entry: LabelEntry, role: str = "ref") -> tuple[Inline, ...]:
    if role == "eq" or entry.kind is LabelKind.EQUATION:
        return (Text(f"({entry.number})", entry.span),)
    if entry.kind is LabelKind.FIGURE:
        return (Text(f"Figure {entry.number}", entry.span),)
    if entry.title:
        return entry.title
    return (Text(f"Section {entry.number}", entry.span),)


def resolve_references(
    document: Document,
    table: LabelTable,
    *,
    href: Callable[[LabelEntry], str] | None = lambda e: f"#{e.anchor}",
    available: set[str] | None = None,
) -> tuple[Document, list[Diagnostic]]:
    """Replace {ref}/{eq} roles by links (or plain text when ``href`` is None).

    Labels outside ``available`` (content dropped for this target) resolve to
    their text without a link.  Unknown labels become ``??`` plus an error.
    """
    diagnostics: list[Diagnostic] = []

    def resolve(node: Inline) -> Inline | tuple[Inline, ...]:
        if not isinstance(node, (RefRole, EqRole)):
            return node
        entry = table.get(node.label)
        if entry is None:
            diagnostics.append(
                error("dangling-reference", f"reference to undefined label {node.label!r}", node.span, document.source_name)
            )
            return Text("??", node.span)
        role = "eq" if isinstance(node, EqRole) else "ref"
        if role == "eq" and entry.kind is not LabelKind.EQUATION:
            diagnostics.append(
                warning(
                    "wrong-reference-kind",
                    f"{{eq}} points at {entry.kind.value} {node.label!r}",
                    node.span,
                    document.source_name,
                )
            )
            role = "ref"
        text = reference_text(entry, role)
        if href is None or (available is not None and node.label not in available):
            return Text(plain_text(text), node.span)
        return Link(href(entry), text, node.span)

    resolved = map_document(document, resolve)
    return resolved, diagnostics


def labels_in(documents: Iterable[Document]) -> set[str]:
    """Labels defined by blocks present in ``documents``."""
    return {
        block.label
        for doc in documents
        for block in document_blocks(doc)
        if isinstance(block, (Heading, Figure, MathBlock)) and block.label
    }
