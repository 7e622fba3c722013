"""Document object model shared by the parser, the resolvers and the emitters.

Every node is a frozen dataclass carrying a :class:`SourceSpan`.  Child
collections are tuples so that a parsed document can be shared freely
between targets without defensive copies.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field, replace
from enum import Enum
import re
from typing import Any, Union

LABEL_RE = re.compile(r"[a-zA-Z0-9_-]+")

RESERVED_TAGS = frozenset(
    {"skip-book", "skip-notebook", "skip-slides", "hide-input", "hide-output"}
)
USER_TAG_PREFIX = "x-"


class Target(str, Enum):
    BOOK = "book"
    NOTEBOOK = "notebook"
    SLIDES = "slides"

    @property
    def skip_tag(self) -> str:
        return f"skip-{self.value}"


class SlideType(str, Enum):
    SLIDE = "slide"
    SUBSLIDE = "subslide"
    FRAGMENT = "fragment"
    NOTES = "notes"
    SKIP = "skip"


@dataclass(frozen=True, slots=True)
class SourceSpan:
    start_line: int
    end_line: int

    def __post_init__(self) -> None:
        if self.start_line < 1 or self.end_line < self.start_line:
            raise ValueError(f"invalid span {self.start_line}..{self.end_line}")

    def lines(self) -> range:
        return range(self.start_line, self.end_line + 1)


@dataclass(frozen=True, slots=True)
class TagSet:
    tags: frozenset[str] = frozenset()

    def __contains__(self, tag: object) -> bool:
        return tag in self.tags

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.tags))

    def __len__(self) -> int:
        return len(self.tags)

    def __or__(self, other: TagSet) -> TagSet:
        return TagSet(self.tags | other.tags)

    def as_list(self) -> list[str]:
        return sorted(self.tags)


# -- inlines ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Text:
    text: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Emph:
    children: tuple[Inline, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Strong:
    children: tuple[Inline, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class CodeSpan:
    text: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Link:
    url: str
    children: tuple[Inline, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Image:
    url: str
    alt: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class MathInline:
    latex: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class CiteRole:
    keys: tuple[str, ...]
    span: SourceSpan

    def __post_init__(self) -> None:
        if not self.keys:
            raise ValueError("CiteRole needs at least one key")


@dataclass(frozen=True, slots=True)
class RefRole:
    label: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class EqRole:
    label: str
    span: SourceSpan


Inline = Union[Text, Emph, Strong, CodeSpan, Link, Image, MathInline, CiteRole, RefRole, EqRole]


# -- blocks ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Heading:
    level: int
    children: tuple[Inline, ...]
    span: SourceSpan
    label: str | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.level <= 6:
            raise ValueError(f"heading level {self.level} out of range")


@dataclass(frozen=True, slots=True)
class Paragraph:
    children: tuple[Inline, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class CodeCell:
    language: str
    source: str
    span: SourceSpan
    tags: TagSet = TagSet()
    options: dict[str, str] = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self) -> None:
        if not self.language:
            raise ValueError("CodeCell.language must be non-empty")


@dataclass(frozen=True, slots=True)
class CodeBlock:
    language: str | None
    source: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class MathBlock:
    latex: str
    span: SourceSpan
    label: str | None = None


@dataclass(frozen=True, slots=True)
class Figure:
    target: str
    alt: str
    caption: tuple[Inline, ...]
    span: SourceSpan
    label: str | None = None


@dataclass(frozen=True, slots=True)
class Admonition:
    kind: str
    children: tuple[Block, ...]
    span: SourceSpan
    title: str | None = None


@dataclass(frozen=True, slots=True)
class Bibliography:
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class ListItem:
    children: tuple[Block, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class ListBlock:
    ordered: bool
    items: tuple[ListItem, ...]
    span: SourceSpan
    start: int = 1
    tight: bool = True


@dataclass(frozen=True, slots=True)
class BlockQuote:
    children: tuple[Block, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Table:
    header: tuple[tuple[Inline, ...], ...]
    rows: tuple[tuple[tuple[Inline, ...], ...], ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class ThematicBreak:
    span: SourceSpan


Block = Union[
    Heading,
    Paragraph,
    CodeCell,
    CodeBlock,
    MathBlock,
    Figure,
    Admonition,
    Bibliography,
    ListBlock,
    BlockQuote,
    Table,
    ThematicBreak,
]

LABELLED_BLOCKS = (Heading, MathBlock, Figure)


@dataclass(frozen=True, slots=True)
class FrontMatter:
    title: str | None = None
    authors: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True, slots=True)
class Fragment:
    blocks: tuple[Block, ...]
    span: SourceSpan
    tags: TagSet = TagSet()
    slide_type: SlideType | None = None


@dataclass(frozen=True, slots=True)
class Document:
    frontmatter: FrontMatter
    fragments: tuple[Fragment, ...]
    source_name: str

    @property
    def stem(self) -> str:
        name = self.source_name.replace("\\", "/").rsplit("/", 1)[-1]
        return name.rsplit(".", 1)[0] if "." in name else name


# -- traversal -------------------------------------------------------------


def child_blocks(block: Block) -> tuple[Block, ...]:
    if isinstance(block, (Admonition, BlockQuote)):
        return block.children
    if isinstance(block, ListBlock):
        return tuple(b for item in block.items for b in item.children)
    return ()


def walk_blocks(blocks: Iterable[Block]) -> Iterator[Block]:
    """Yield blocks depth-first in document order, containers before their children."""
    for block in blocks:
        yield block
        yield from walk_blocks(child_blocks(block))


def block_inlines(block: Block) -> tuple[Inline, ...]:
    """Inline content held directly by ``block`` (not by nested blocks)."""
    if isinstance(block, (Heading, Paragraph)):
        return block.children
    if isinstance(block, Figure):
        return block.caption
    if isinstance(block, Table):
        cells = list(block.header) + [cell for row in block.rows for cell in row]
        return tuple(i for cell in cells for i in cell)
    return ()


def walk_inlines(inlines: Iterable[Inline]) -> Iterator[Inline]:
    for node in inlines:
        yield node
        if isinstance(node, (Emph, Strong, Link)):
            yield from walk_inlines(node.children)


def document_blocks(doc: Document) -> Iterator[Block]:
    for fragment in doc.fragments:
        yield from walk_blocks(fragment.blocks)


def document_inlines(doc: Document) -> Iterator[Inline]:
    for block in document_blocks(doc):
        yield from walk_inlines(block_inlines(block))


def plain_text(inlines: Iterable[Inline]) -> str:
    """Flatten inlines to their visible text (roles render as their raw content)."""
    parts: list[str] = []
    for node in inlines:
        if isinstance(node, (Text, CodeSpan)):
            parts.append(node.text)
        elif isinstance(node, (Emph, Strong, Link)):
            parts.append(plain_text(node.children))
        elif isinstance(node, Image):
            parts.append(node.alt)
        elif isinstance(node, MathInline):
            parts.append(node.latex)
        elif isinstance(node, CiteRole):
            parts.append(", ".join(node.keys))
        elif isinstance(node, (RefRole, EqRole)):
            parts.append(node.label)
    return "".join(parts)


# -- rewriting -------------------------------------------------------------

InlineFn = Callable[[Inline], "Inline | tuple[Inline, ...]"]


def map_inlines(inlines: Iterable[Inline], fn: InlineFn) -> tuple[Inline, ...]:
    """Apply ``fn`` bottom-up; ``fn`` may return one node or a tuple to splice in."""
    out: list[Inline] = []
    for node in inlines:
        if isinstance(node, (Emph, Strong, Link)):
            node = replace(node, children=map_inlines(node.children, fn))
        result = fn(node)
        if isinstance(result, tuple):
            out.extend(result)
        else:
            out.append(result)
    return tuple(out)


def map_block(block: Block, fn: InlineFn) -> Block:
    if isinstance(block, (Heading, Paragraph)):
        return replace(block, children=map_inlines(block.children, fn))
    if isinstance(block, Figure):
        return replace(block, caption=map_inlines(block.caption, fn))
    if isinstance(block, Table):
        return replace(
            block,
            header=tuple(map_inlines(c, fn) for c in block.header),
            rows=tuple(tuple(map_inlines(c, fn) for c in row) for row in block.rows),
        )
    if isinstance(block, (Admonition, BlockQuote)):
        return replace(block, children=tuple(map_block(b, fn) for b in block.children))
    if isinstance(block, ListBlock):
        return replace(
            block,
            items=tuple(replace(it, children=tuple(map_block(b, fn) for b in it.children)) for it in block.items),
        )
    return block


def map_document(doc: Document, fn: InlineFn) -> Document:
    fragments = tuple(replace(f, blocks=tuple(map_block(b, fn) for b in f.blocks)) for f in doc.fragments)
    return replace(doc, fragments=fragments)
