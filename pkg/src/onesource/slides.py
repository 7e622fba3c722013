"""reveal.js slide deck: partitioning fragments into slides and rendering the deck."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .assets import asset_url
from .bibliography import CitationMap
from .config import Config
from .diagnostics import Diagnostic, warning
from .htmlrender import HtmlContext, HtmlRenderer, escape
from .nodes import Block, Document, Heading, SlideType, TagSet, Target
from .xref import LabelTable


@dataclass(frozen=True, slots=True)
class SlideBlock:
    """A block placed on a slide, with the context needed to render it."""

    block: Block
    source_name: str
    tags: TagSet = TagSet()


@dataclass
class Slide:
    blocks: list[SlideBlock] = field(default_factory=list)
    subslides: list[Slide] = field(default_factory=list)
    # half-open index ranges into ``blocks`` revealed one step at a time
    fragments_revealed: list[tuple[int, int]] = field(default_factory=list)
    notes: list[SlideBlock] = field(default_factory=list)
    title_slide: bool = False


@dataclass
class SlideDeck:
    slides: list[Slide] = field(default_factory=list)
    title: str = ""
    authors: list[str] = field(default_factory=list)
    theme_url: str = ""
    runtime_base_url: str = ""


def _split_on_headings(blocks: list[SlideBlock]) -> list[list[SlideBlock]]:
    """Chunks where every chunk after the first starts with an H1/H2."""
    chunks: list[list[SlideBlock]] = [[]]
    for sb in blocks:
        if isinstance(sb.block, Heading) and sb.block.level <= 2:
            chunks.append([])
        chunks[-1].append(sb)
    return chunks


def partition_slides(
    documents: Document | Sequence[Document],
    *,
    title: str | None = None,
    authors: Sequence[str] = (),
) -> tuple[SlideDeck, list[Diagnostic]]:
    """Walk slides-filtered fragments in order and build the slide tree.

    Explicit slide types win; un-annotated fragments start a new slide at
    every H1/H2 heading.  Content before the first slide lands on a title
    slide, which is also the sole slide of an empty deck.
    """
    docs = [documents] if isinstance(documents, Document) else list(documents)
    diagnostics: list[Diagnostic] = []
    deck = SlideDeck(
        title=title or next((d.frontmatter.title for d in docs if d.frontmatter.title), "") or "",
        authors=list(authors) or [a for d in docs for a in d.frontmatter.authors],
    )
    top: Slide | None = None
    current: Slide | None = None

    def receiving() -> Slide:
        nonlocal top, current
        if current is None:
            top = current = Slide(title_slide=True)
            deck.slides.append(top)
        return current

    def open_top(blocks: list[SlideBlock]) -> None:
        nonlocal top, current
        top = current = Slide(blocks=list(blocks))
        deck.slides.append(top)

    for doc in docs:
        for fragment in doc.fragments:
            placed = [SlideBlock(b, doc.source_name, fragment.tags) for b in fragment.blocks]
            kind = fragment.slide_type
            if kind is SlideType.SKIP:
                continue
            if kind is SlideType.SLIDE:
                open_top(placed)
            elif kind is SlideType.SUBSLIDE:
                if top is None or top.title_slide:
                    diagnostics.append(
                        warning(
                            "subslide-before-slide",
                            "subslide has no enclosing slide; promoted to a slide",
                            fragment.span,
                            doc.source_name,
                        )
                    )
                    open_top(placed)
                else:
                    current = Slide(blocks=placed)
                    top.subslides.append(current)
            elif kind is SlideType.FRAGMENT:
                slide = receiving()
                start = len(slide.blocks)
                slide.blocks.extend(placed)
                slide.fragments_revealed.append((start, len(slide.blocks)))
            elif kind is SlideType.NOTES:
                receiving().notes.extend(placed)
            else:
                first, *rest = _split_on_headings(placed)
                if first:
                    receiving().blocks.extend(first)
                for chunk in rest:
                    open_top(chunk)
    if not deck.slides:
        deck.slides.append(Slide(title_slide=True))
    return deck, diagnostics


# -- rendering -------------------------------------------------------------


def _render_blocks(renderer: HtmlRenderer, items: Sequence[SlideBlock]) -> str:
    out = []
    assert renderer.ctx is not None
    for sb in items:
        renderer.ctx.source_name = sb.source_name
        renderer.ctx.fragment_tags = sb.tags
        out.append(renderer.block(sb.block))
    return "".join(out)


def _render_slide(renderer: HtmlRenderer, slide: Slide, deck: SlideDeck) -> str:
    body = []
    if slide.title_slide:
        body.append(f'<h1 class="title">{escape(deck.title)}</h1>\n' if deck.title else "")
        if deck.authors:
            body.append(f'<p class="authors">{escape(", ".join(dict.fromkeys(deck.authors)))}</p>\n')
    k = 0
    for start, end in slide.fragments_revealed:
        body.append(_render_blocks(renderer, slide.blocks[k:start]))
        body.append(f'<div class="fragment">\n{_render_blocks(renderer, slide.blocks[start:end])}</div>\n')
        k = end
    body.append(_render_blocks(renderer, slide.blocks[k:]))
    if slide.notes:
        body.append(f'<aside class="notes">\n{_render_blocks(renderer, slide.notes)}</aside>\n')
    return "<section>\n" + "".join(body) + "</section>\n"


def render_deck(
    deck: SlideDeck,
    config: Config,
    *,
    labels: LabelTable | None = None,
    citations: CitationMap | None = None,
) -> str:
    """One self-contained HTML file; the reveal.js runtime is loaded from ``runtime_base_url``."""
    base = (deck.runtime_base_url or config.slides_runtime_base_url).rstrip("/")
    theme = deck.theme_url or config.theme_url
    renderer = HtmlRenderer(
        HtmlContext(target=Target.SLIDES, labels=labels, citations=citations, asset_url=asset_url, number_headings=False)
    )
    sections = []
    for slide in deck.slides:
        if slide.subslides:
            inner = _render_slide(renderer, slide, deck) + "".join(_render_slide(renderer, s, deck) for s in slide.subslides)
            sections.append(f"<section>\n{inner}</section>\n")
        else:
            sections.append(_render_slide(renderer, slide, deck))
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8" />\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1" />\n'
        f"<title>{escape(deck.title or 'Slides')}</title>\n"
        f'<link rel="stylesheet" href="{escape(base)}/dist/reveal.css" />\n'
        f'<link rel="stylesheet" href="{escape(theme)}" />\n'
        "<style>\n.reveal .math-block .eqno { float: right; }\n.reveal figure img { max-height: 50vh; }\n</style>\n"
        "</head>\n"
        "<body>\n"
        '<div class="reveal">\n'
        '<div class="slides">\n'
        f"{''.join(sections)}"
        "</div>\n"
        "</div>\n"
        f'<script src="{escape(base)}/dist/reveal.js"></script>\n'
        f'<script src="{escape(base)}/plugin/notes/notes.js"></script>\n'
        "<script>window.MathJax = { tex: { inlineMath: [['\\\\(', '\\\\)']], "
        "displayMath: [['\\\\[', '\\\\]']] } };</script>\n"
        f'<script async="async" src="{escape(config.math_renderer_url)}"></script>\n'
        "<script>Reveal.initialize({ hash: true, plugins: [RevealNotes] });</script>\n"
        "</body>\n"
        "</html>\n"
    )
