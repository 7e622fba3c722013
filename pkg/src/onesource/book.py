"""Static multi-page HTML book."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from html.parser import HTMLParser
import posixpath
from urllib.parse import unquote

from .assets import asset_url, is_external
from .bibliography import CitationMap, format_reference
from .config import Config
from .htmlrender import HtmlContext, HtmlRenderer, escape
from .nodes import Document, Heading, Target, plain_text
from .xref import LabelTable

REFERENCES_PAGE = "references.html"
INDEX_PAGE = "index.html"

STYLESHEET = """\
body { margin: 0; font-family: Georgia, serif; line-height: 1.5; color: #222; }
nav.sidebar { position: fixed; top: 0; left: 0; bottom: 0; width: 15rem; padding: 1rem;
  overflow-y: auto; background: #f6f6f6; border-right: 1px solid #ddd; font-family: sans-serif; }
nav.sidebar ul { list-style: none; padding-left: 0; }
nav.sidebar a[aria-current] { font-weight: bold; }
main { margin-left: 17rem; max-width: 46rem; padding: 1rem 2rem; }
footer { margin-left: 17rem; padding: 1rem 2rem; color: #777; font-size: 0.85rem; }
figure { margin: 1.5rem 0; text-align: center; }
figure img { max-width: 100%; }
figcaption { font-size: 0.9rem; }
.math-block { margin: 1rem 0; text-align: center; }
.math-block .eqno { float: right; }
pre { background: #f4f4f4; padding: 0.75rem; overflow-x: auto; }
details.cell > summary { cursor: pointer; color: #555; }
aside.admonition { border-left: 4px solid #4a7; padding: 0.25rem 1rem; background: #f3faf5; }
aside.admonition.warning { border-color: #d94; background: #fdf6ec; }
.admonition-title { font-weight: bold; }
table { border-collapse: collapse; }
th, td { border: 1px solid #ccc; padding: 0.25rem 0.5rem; }
"""


@dataclass
class SiteBundle:
    pages: list[tuple[str, bytes]] = field(default_factory=list)
    assets: list[tuple[str, bytes]] = field(default_factory=list)
    nav: list[tuple[str, str]] = field(default_factory=list)

    def files(self) -> dict[str, bytes]:
        return dict(self.pages + self.assets)


def page_names(documents: Sequence[Document]) -> dict[str, str]:
    """Source name -> page file name, unique and never clashing with the fixed pages."""
    taken = {INDEX_PAGE, REFERENCES_PAGE}
    names: dict[str, str] = {}
    for doc in documents:
        stem = doc.stem or "page"
        candidate = f"{stem}.html"
        n = 2
        while candidate in taken:
            candidate = f"{stem}-{n}.html"
            n += 1
        taken.add(candidate)
        names[doc.source_name] = candidate
    return names


def document_title(doc: Document) -> str:
    if doc.frontmatter.title:
        return doc.frontmatter.title
    for fragment in doc.fragments:
        for block in fragment.blocks:
            if isinstance(block, Heading):
                return plain_text(block.children)
    return doc.stem


def _nav_html(nav: Sequence[tuple[str, str]], title: str, current: str) -> str:
    items = []
    for label, path in [*nav, ("References", REFERENCES_PAGE)]:
        mark = ' aria-current="page"' if path == current else ""
        items.append(f'<li><a href="{escape(path)}"{mark}>{escape(label)}</a></li>\n')
    return (
        '<nav class="sidebar">\n'
        f'<p class="book-title"><a href="{INDEX_PAGE}">{escape(title)}</a></p>\n'
        f"<ul>\n{''.join(items)}</ul>\n"
        "</nav>\n"
    )


def _page(title: str, body: str, config: Config, nav_html: str, book_title: str) -> str:
    math_url = escape(config.math_renderer_url)
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n'
        "<head>\n"
        '<meta charset="utf-8" />\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1" />\n'
        f"<title>{escape(title)}</title>\n"
        f"<style>\n{STYLESHEET}</style>\n"
        "<script>window.MathJax = { tex: { inlineMath: [['\\\\(', '\\\\)']], "
        "displayMath: [['\\\\[', '\\\\]']] } };</script>\n"
        f'<script id="MathJax-script" async="async" src="{math_url}"></script>\n'
        "</head>\n"
        "<body>\n"
        f"{nav_html}"
        f"<main>\n{body}</main>\n"
        f"<footer>\n<p>{escape(book_title)}</p>\n</footer>\n"
        "</body>\n"
        "</html>\n"
    )


def book_title(documents: Sequence[Document], config: Config) -> str:
    if config.title:
        return config.title
    for doc in documents:
        if doc.frontmatter.title:
            return doc.frontmatter.title
    return "Untitled"


def render_page(
    document: Document,
    label_table: LabelTable,
    citation_map: CitationMap,
    config: Config,
    *,
    nav: Sequence[tuple[str, str]] = (),
    page_path: str = "",
    title: str | None = None,
) -> str:
    """Render one filtered, reference-resolved document as a complete HTML page."""
    renderer = HtmlRenderer(
        HtmlContext(
            target=Target.BOOK,
            source_name=document.source_name,
            labels=label_table,
            citations=citation_map,
            citation_href=REFERENCES_PAGE,
            asset_url=asset_url,
        )
    )
    parts = []
    for fragment in document.fragments:
        assert renderer.ctx is not None
        renderer.ctx.fragment_tags = fragment.tags
        parts.append(renderer.blocks(fragment.blocks))
    heading = title or book_title([document], config)
    return _page(document_title(document), "".join(parts), config, _nav_html(nav, heading, page_path), heading)


def render_index(documents: Sequence[Document], config: Config, nav: Sequence[tuple[str, str]]) -> str:
    title = book_title(documents, config)
    authors = config.authors or [a for d in documents for a in d.frontmatter.authors]
    body = f'<h1 class="title">{escape(title)}</h1>\n'
    if authors:
        body += f'<p class="authors">{escape(", ".join(dict.fromkeys(authors)))}</p>\n'
    contents = "".join(f'<li><a href="{escape(p)}">{escape(t)}</a></li>\n' for t, p in nav)
    body += f"<h2>Contents</h2>\n<ol>\n{contents}</ol>\n"
    return _page(title, body, config, _nav_html(nav, title, INDEX_PAGE), title)


def render_references(citation_map: CitationMap, config: Config, nav: Sequence[tuple[str, str]], title: str) -> str:
    items = "".join(
        f'<li id="ref-{escape(e.key)}">{escape(format_reference(e))}</li>\n' for e in citation_map.references
    )
    body = f'<h1>References</h1>\n<ul class="references">\n{items}</ul>\n'
    return _page("References", body, config, _nav_html(nav, title, REFERENCES_PAGE), title)


def build_site(
    documents: Sequence[Document],
    config: Config,
    label_table: LabelTable,
    citation_map: CitationMap,
    assets: dict[str, bytes] | None = None,
) -> SiteBundle:
    """Assemble index, one page per source document (config order) and the reference list."""
    names = page_names(documents)
    nav = [(document_title(d), names[d.source_name]) for d in documents]
    title = book_title(documents, config)
    pages = [(INDEX_PAGE, render_index(documents, config, nav))]
    for doc in documents:
        html = render_page(doc, label_table, citation_map, config, nav=nav, page_path=names[doc.source_name], title=title)
        pages.append((names[doc.source_name], html))
    pages.append((REFERENCES_PAGE, render_references(citation_map, config, nav, title)))
    return SiteBundle(
        pages=[(p, h.encode("utf-8")) for p, h in pages],
        assets=sorted((assets or {}).items()),
        nav=nav,
    )


# -- audits ---------------------------------------------------------------

VOID_ELEMENTS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr"}
)


class _LinkCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.ids: set[str] = set()
        self.links: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        for name, value in attrs:
            if value is None:
                continue
            if name == "id":
                self.ids.add(value)
            elif (name == "href" and tag == "a") or (name == "src" and tag == "img"):
                self.links.append(value)

    handle_startendtag = handle_starttag


def audit_links(files: dict[str, bytes]) -> list[str]:
    """Internal links in an HTML bundle whose page, file or anchor does not exist."""
    parsed: dict[str, _LinkCollector] = {}
    for path, data in files.items():
        if path.endswith(".html"):
            collector = _LinkCollector()
            collector.feed(data.decode("utf-8"))
            parsed[path] = collector
    problems = []
    for page, collector in sorted(parsed.items()):
        for link in collector.links:
            if is_external(link):
                continue
            target, _, anchor = unquote(link).partition("#")
            target_path = posixpath.normpath(posixpath.join(posixpath.dirname(page), target)) if target else page
            if target_path not in files:
                problems.append(f"{page}: {link} (missing file)")
            elif anchor and (target_path not in parsed or anchor not in parsed[target_path].ids):
                problems.append(f"{page}: {link} (missing anchor)")
    return problems
