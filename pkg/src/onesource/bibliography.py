"""BibTeX parsing and author-year citation rendering."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
import re

from .diagnostics import Diagnostic, error, warning
from .nodes import CiteRole, Document, SourceSpan, document_inlines

_ENTRY_START = re.compile(r"@[ \t]*([A-Za-z]+)[ \t\n]*([{(])")
_FIELD_NAME = re.compile(r"[ \t\n]*([A-Za-z][\w:.+-]*)[ \t\n]*=[ \t\n]*")
_IGNORED = {"comment", "preamble", "string"}


@dataclass(frozen=True, slots=True)
class BibEntry:
    key: str
    entry_type: str
    fields: dict[str, str] = field(hash=False)
    line: int = 1
    source: str = "<string>"

    @property
    def year(self) -> str | None:
        year = self.fields.get("year", "").strip()
        return year or None


@dataclass(frozen=True, slots=True)
class Citation:
    key: str
    text: str
    anchor: str


@dataclass
class CitationMap:
    citations: dict[str, Citation] = field(default_factory=dict)
    references: list[BibEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.citations)

    def label(self, key: str) -> str:
        """Citation text without parentheses, ``??`` for unknown keys."""
        citation = self.citations.get(key)
        return citation.text[1:-1] if citation else "??"

    def render(self, keys: Iterable[str]) -> str:
        return "(" + "; ".join(self.label(k) for k in keys) + ")"


def _matching_brace(text: str, start: int) -> int | None:
    """Index of the brace closing the one at ``start``."""
    depth = 0
    for i in range(start, len(text)):
        ch = text[i]
        if ch == "\\":
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i
    return None


def _entry_end(text: str, open_at: int) -> int | None:
    if text[open_at] == "{":
        return _matching_brace(text, open_at)
    depth = 0
    for i in range(open_at + 1, len(text)):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                return None
        elif ch == ")" and depth == 0:
            return i
    return None


def _parse_value(body: str, i: int) -> tuple[str, int] | None:
    """Parse ``piece (# piece)*`` starting at ``i``; returns the value and the end offset."""
    pieces: list[str] = []
    while True:
        while i < len(body) and body[i].isspace():
            i += 1
        if i >= len(body):
            return None
        ch = body[i]
        if ch == "{":
            end = _matching_brace(body, i)
            if end is None:
                return None
            pieces.append(body[i + 1 : end])
            i = end + 1
        elif ch == '"':
            depth = 0
            j = i + 1
            while j < len(body):
                if body[j] == "{":
                    depth += 1
                elif body[j] == "}":
                    depth -= 1
                elif body[j] == '"' and depth == 0:
                    break
                j += 1
            if j >= len(body) or depth:
                return None
            pieces.append(body[i + 1 : j])
            i = j + 1
        else:
            m = re.compile(r"[^\s,#{}\"]+").match(body, i)
            if not m:
                return None
            pieces.append(m.group(0))
            i = m.end()
        while i < len(body) and body[i].isspace():
            i += 1
        if i < len(body) and body[i] == "#":
            i += 1
            continue
        return "".join(pieces), i


def parse_bibtex(text: str, source: str = "<string>") -> tuple[list[BibEntry], list[Diagnostic]]:
    """Parse BibTeX entries; text outside ``@type{...}`` is ignored as comment."""
    text = text.replace("\r\n", "\n")
    entries: list[BibEntry] = []
    seen: dict[str, BibEntry] = {}
    diagnostics: list[Diagnostic] = []
    i = 0
    while True:
        m = _ENTRY_START.search(text, i)
        if not m:
            break
        line = text.count("\n", 0, m.start()) + 1
        span = SourceSpan(line, line)
        entry_type = m.group(1).lower()
        open_at = m.end() - 1
        end = _entry_end(text, open_at)
        if end is None:
            diagnostics.append(error("unbalanced-braces", f"@{entry_type} entry has unbalanced braces; skipped", span, source))
            nxt = text.find("\n@", m.end())
            i = len(text) if nxt < 0 else nxt + 1
            continue
        i = end + 1
        if entry_type in _IGNORED:
            diagnostics.append(warning("bib-ignored", f"@{entry_type} is not supported and was ignored", span, source))
            continue
        body = text[open_at + 1 : end]
        comma = body.find(",")
        key = (body if comma < 0 else body[:comma]).strip()
        if not key or any(c.isspace() for c in key):
            diagnostics.append(warning("bib-ignored", f"@{entry_type} entry without a usable key was ignored", span, source))
            continue
        fields: dict[str, str] = {}
        pos = len(body) if comma < 0 else comma + 1
        ok = True
        while pos < len(body):
            if not body[pos:].strip():
                break
            fm = _FIELD_NAME.match(body, pos)
            if not fm:
                ok = False
                break
            parsed = _parse_value(body, fm.end())
            if parsed is None:
                ok = False
                break
            value, pos = parsed
            fields[fm.group(1).lower()] = value
            if pos < len(body) and body[pos] == ",":
                pos += 1
            elif body[pos:].strip():
                ok = False
                break
        if not ok:
            diagnostics.append(error("unbalanced-braces", f"entry {key!r} is malformed; skipped", span, source))
            continue
        if key in seen:
            diagnostics.append(
                error("duplicate-key", f"duplicate key {key!r} (first defined on line {seen[key].line}); skipped", span, source)
            )
            continue
        entry = BibEntry(key, entry_type, fields, line, source)
        seen[key] = entry
        entries.append(entry)
    return entries, diagnostics


# -- names ----------------------------------------------------------------


def _split_top_level(text: str, sep: re.Pattern[str]) -> list[str]:
    """Split on ``sep`` matches that are not inside braces."""
    parts, depth, last = [], 0, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        elif depth == 0:
            m = sep.match(text, i)
            if m and m.end() > i:
                parts.append(text[last:i])
                last = i = m.end()
                continue
        i += 1
    parts.append(text[last:])
    return [p.strip() for p in parts if p.strip()]


_AND = re.compile(r"\s+and\s+", re.I)
_WS = re.compile(r"\s+")


def split_authors(author_field: str) -> list[str]:
    return _split_top_level(" ".join(author_field.split()), _AND)


def strip_braces(text: str) -> str:
    return " ".join(text.replace("{", "").replace("}", "").split())


def family_name(author: str) -> str:
    """``"Family, Given"`` -> Family; otherwise the last whitespace-separated token."""
    if "," in author:
        return strip_braces(_split_top_level(author, re.compile(","))[0])
    tokens = _split_top_level(author, _WS)
    return strip_braces(tokens[-1]) if tokens else ""


_LATEX_ESCAPES = {r"\&": "&", r"\%": "%", r"\$": "$", r"\_": "_", r"\#": "#", "~": " "}


def plain_field(text: str) -> str:
    """Field value as display text: braces dropped, common LaTeX escapes decoded."""
    text = strip_braces(text)
    for latex, plain in _LATEX_ESCAPES.items():
        text = text.replace(latex, plain)
    return " ".join(text.split())


def display_name(author: str) -> str:
    """``"Given Family"`` or ``"Family, Given"`` -> ``"Family, Given"``."""
    if "," in author:
        return plain_field(author)
    tokens = _split_top_level(author, _WS)
    if len(tokens) < 2:
        return plain_field(author)
    return f"{plain_field(tokens[-1])}, {plain_field(' '.join(tokens[:-1]))}"


def citation_label(entry: BibEntry) -> str:
    year = entry.year or "n.d."
    authors = split_authors(entry.fields.get("author", ""))
    if not authors:
        return f"{entry.key}, {year}"
    others = authors[-1].lower() == "others"
    if others:
        authors = authors[:-1]
    families = [family_name(a) for a in authors]
    if len(families) >= 3 or (others and families):
        who = f"{families[0]} et al."
    elif len(families) == 2:
        who = f"{families[0]} and {families[1]}"
    else:
        who = families[0]
    return f"{who}, {year}"


def format_citation(entry: BibEntry) -> str:
    """Inline author-year form, e.g. ``(Flach, 1994)``."""
    return f"({citation_label(entry)})"


def format_reference(entry: BibEntry) -> str:
    """One reference-list line in plain text."""
    authors = split_authors(entry.fields.get("author", ""))
    others = bool(authors) and authors[-1].lower() == "others"
    names = [display_name(a) for a in (authors[:-1] if others else authors)]
    who = "; ".join(names) if names else entry.key
    if others:
        who += " et al."
    parts = [f"{who} ({entry.year or 'n.d.'})."]
    title = plain_field(entry.fields.get("title", ""))
    if title:
        parts.append(title if title.endswith((".", "?", "!")) else title + ".")
    for venue_key in ("journal", "booktitle", "publisher", "howpublished", "school", "institution"):
        venue = plain_field(entry.fields.get(venue_key, ""))
        if venue:
            parts.append(venue + ".")
            break
    return " ".join(parts)


def sort_key(entry: BibEntry) -> tuple[str, bool, str, str]:
    authors = split_authors(entry.fields.get("author", ""))
    family = family_name(authors[0]) if authors else entry.key
    return (family.casefold(), entry.year is None, entry.year or "", entry.key)


def resolve_citations(
    documents: Iterable[Document], entries: Iterable[BibEntry]
) -> tuple[CitationMap, list[Diagnostic]]:
    """Map every cited key to its inline text and build the sorted reference list."""
    by_key = {e.key: e for e in entries}
    cited: dict[str, BibEntry] = {}
    diagnostics: list[Diagnostic] = []
    for doc in documents:
        for node in document_inlines(doc):
            if not isinstance(node, CiteRole):
                continue
            for key in node.keys:
                entry = by_key.get(key)
                if entry is None:
                    diagnostics.append(
                        error("dangling-citation", f"citation key {key!r} is not in the bibliography", node.span, doc.source_name)
                    )
                elif key not in cited:
                    cited[key] = entry
                    if "author" not in entry.fields:
                        diagnostics.append(
                            warning(
                                "missing-author",
                                f"entry {key!r} has no author; citing it by key",
                                SourceSpan(entry.line, entry.line),
                                entry.source,
                            )
                        )
    citations = {key: Citation(key, format_citation(e), f"ref-{key}") for key, e in cited.items()}
    references = sorted(cited.values(), key=sort_key)
    return CitationMap(citations, references), diagnostics
