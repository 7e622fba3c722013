"""AST -> HTML fragments, shared by the book and slide emitters.

Without a context the output follows the CommonMark reference renderer's
conventions, which the conformance tests rely on.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from urllib.parse import quote

from .bibliography import CitationMap, format_reference
from .filtering import Visibility, visibility
from .nodes import (
    Admonition,
    Bibliography,
    Block,
    BlockQuote,
    CiteRole,
    CodeBlock,
    CodeCell,
    CodeSpan,
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
    Strong,
    Table,
    TagSet,
    Target,
    Text,
    ThematicBreak,
)
from .xref import LabelTable


def escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def escape_url(url: str) -> str:
    return escape(quote(url, safe=";/?:@&=+$,-_.!~*'()#%"))


@dataclass
class HtmlContext:
    target: Target = Target.BOOK
    source_name: str = ""
    labels: LabelTable | None = None
    citations: CitationMap | None = None
    # page holding the reference list; None renders citations without links
    citation_href: str | None = None
    asset_url: Callable[[str, str], str] | None = None
    number_headings: bool = True
    fragment_tags: TagSet = field(default_factory=TagSet)


class HtmlRenderer:
    def __init__(self, context: HtmlContext | None = None) -> None:
        self.ctx = context

    # -- inlines ------------------------------------------------------------

    def inlines(self, nodes: Iterable[Inline]) -> str:
        return "".join(self.inline(n) for n in nodes)

    def inline(self, node: Inline) -> str:
        if isinstance(node, Text):
            return escape(node.text)
        if isinstance(node, Emph):
            return f"<em>{self.inlines(node.children)}</em>"
        if isinstance(node, Strong):
            return f"<strong>{self.inlines(node.children)}</strong>"
        if isinstance(node, CodeSpan):
            return f"<code>{escape(node.text)}</code>"
        if isinstance(node, Link):
            return f'<a href="{escape_url(node.url)}">{self.inlines(node.children)}</a>'
        if isinstance(node, Image):
            return f'<img src="{escape_url(node.url)}" alt="{escape(node.alt)}" />'
        if isinstance(node, MathInline):
            return f'<span class="math">\\({escape(node.latex)}\\)</span>'
        if isinstance(node, CiteRole):
            return self.citation(node)
        if isinstance(node, (RefRole, EqRole)):
            return "??"
        raise TypeError(f"unknown inline {node!r}")

    def citation(self, node: CiteRole) -> str:
        cmap = self.ctx.citations if self.ctx else None
        if cmap is None:
            return escape("(" + "; ".join(node.keys) + ")")
        href = self.ctx.citation_href if self.ctx else None
        if href is None:
            return f'<span class="citation">{escape(cmap.render(node.keys))}</span>'
        parts = []
        for key in node.keys:
            cit = cmap.citations.get(key)
            if cit is None:
                parts.append("??")
            else:
                parts.append(f'<a class="citation" href="{href}#{cit.anchor}">{escape(cmap.label(key))}</a>')
        return "(" + "; ".join(parts) + ")"

    # -- blocks -------------------------------------------------------------

    def blocks(self, blocks: Iterable[Block], tight: bool = False) -> str:
        return "".join(self.block(b, tight) for b in blocks)

    def block(self, block: Block, tight: bool = False) -> str:
        if isinstance(block, Paragraph):
            body = self.inlines(block.children)
            return body + "\n" if tight else f"<p>{body}</p>\n"
        if isinstance(block, Heading):
            return self.heading(block)
        if isinstance(block, CodeBlock):
            return self.pre(block.language, block.source)
        if isinstance(block, CodeCell):
            return self.code_cell(block)
        if isinstance(block, MathBlock):
            return self.math_block(block)
        if isinstance(block, Figure):
            return self.figure(block)
        if isinstance(block, Admonition):
            title = block.title or block.kind.capitalize()
            return (
                f'<aside class="admonition {escape(block.kind)}">\n'
                f'<p class="admonition-title">{escape(title)}</p>\n'
                f"{self.blocks(block.children)}</aside>\n"
            )
        if isinstance(block, Bibliography):
            return self.bibliography()
        if isinstance(block, ListBlock):
            return self.list_block(block)
        if isinstance(block, BlockQuote):
            return f"<blockquote>\n{self.blocks(block.children)}</blockquote>\n"
        if isinstance(block, Table):
            return self.table(block)
        if isinstance(block, ThematicBreak):
            return "<hr />\n"
        raise TypeError(f"unknown block {block!r}")

    def heading(self, block: Heading) -> str:
        tag = f"h{block.level}"
        attrs = f' id="{escape(block.label)}"' if block.label and self.ctx else ""
        prefix = ""
        if self.ctx and self.ctx.number_headings and self.ctx.labels is not None:
            number = self.ctx.labels.number_for(self.ctx.source_name, block)
            if number:
                prefix = f"{number}&nbsp;"
        return f"<{tag}{attrs}>{prefix}{self.inlines(block.children)}</{tag}>\n"

    @staticmethod
    def pre(language: str | None, source: str) -> str:
        cls = f' class="language-{escape(language)}"' if language else ""
        body = escape(source) + ("\n" if source and not source.endswith("\n") else "")
        return f"<pre><code{cls}>{body}</code></pre>\n"

    def code_cell(self, cell: CodeCell) -> str:
        target = self.ctx.target if self.ctx else Target.BOOK
        inherited = self.ctx.fragment_tags if self.ctx else TagSet()
        vis = visibility(cell, target, inherited)
        code = self.pre(cell.language, cell.source)
        if vis is Visibility.INPUT_HIDDEN:
            return f'<details class="cell hide-input">\n<summary>Show code</summary>\n{code}</details>\n'
        cls = "cell hide-output" if vis is Visibility.OUTPUT_HIDDEN else "cell"
        return f'<div class="{cls}">\n{code}</div>\n'

    def math_block(self, block: MathBlock) -> str:
        number = None
        if self.ctx and self.ctx.labels is not None:
            number = self.ctx.labels.number_for(self.ctx.source_name, block)
        attrs = f' id="{escape(block.label)}"' if block.label and self.ctx else ""
        eqno = f'<span class="eqno">({number})</span>' if number else ""
        return f'<div class="math-block"{attrs}>{eqno}\\[{escape(block.latex)}\\]</div>\n'

    def figure(self, block: Figure) -> str:
        src = block.target
        if self.ctx and self.ctx.asset_url:
            src = self.ctx.asset_url(self.ctx.source_name, src)
        number = None
        if self.ctx and self.ctx.labels is not None:
            number = self.ctx.labels.number_for(self.ctx.source_name, block)
        attrs = f' id="{escape(block.label)}"' if block.label and self.ctx else ""
        caption = self.inlines(block.caption)
        if number:
            caption = f"Figure {number}: {caption}" if caption else f"Figure {number}"
        figcaption = f"<figcaption>{caption}</figcaption>\n" if caption else ""
        return (
            f"<figure{attrs}>\n"
            f'<img src="{escape_url(src)}" alt="{escape(block.alt)}" />\n'
            f"{figcaption}</figure>\n"
        )

    def bibliography(self) -> str:
        cmap = self.ctx.citations if self.ctx else None
        if not cmap or not cmap.references:
            return ""
        items = "".join(f"<li>{escape(format_reference(e))}</li>\n" for e in cmap.references)
        return f'<ul class="references">\n{items}</ul>\n'

    def list_block(self, block: ListBlock) -> str:
        if block.ordered:
            start = f' start="{block.start}"' if block.start != 1 else ""
            open_tag, close_tag = f"<ol{start}>", "</ol>"
        else:
            open_tag, close_tag = "<ul>", "</ul>"
        items = []
        for item in block.items:
            if not item.children:
                items.append("<li></li>\n")
                continue
            inner = self.blocks(item.children, tight=block.tight)
            lead = "" if block.tight and isinstance(item.children[0], Paragraph) else "\n"
            if block.tight and inner.endswith("\n") and isinstance(item.children[-1], Paragraph):
                inner = inner[:-1]
            items.append(f"<li>{lead}{inner}</li>\n")
        return f"{open_tag}\n{''.join(items)}{close_tag}\n"

    def table(self, block: Table) -> str:
        head = "".join(f"<th>{self.inlines(c)}</th>\n" for c in block.header)
        out = f"<table>\n<thead>\n<tr>\n{head}</tr>\n</thead>\n"
        if block.rows:
            rows = "".join(
                "<tr>\n" + "".join(f"<td>{self.inlines(c)}</td>\n" for c in row) + "</tr>\n" for row in block.rows
            )
            out += f"<tbody>\n{rows}</tbody>\n"
        return out + "</table>\n"


def render_blocks(blocks: Iterable[Block], context: HtmlContext | None = None) -> str:
    return HtmlRenderer(context).blocks(blocks)
