"""Block-level parsing of one fragment body.

Lines travel as ``(lineno, text)`` pairs so that container blocks (lists,
block quotes, admonitions) can re-parse dedented content while keeping file
line numbers.
"""

from __future__ import annotations

from dataclasses import replace
import re

from ..diagnostics import Diagnostic, error, warning
from ..nodes import (
    LABEL_RE,
    LABELLED_BLOCKS,
    Block,
    BlockQuote,
    CodeBlock,
    Heading,
    Inline,
    ListBlock,
    ListItem,
    MathBlock,
    Paragraph,
    SourceSpan,
    Table,
    ThematicBreak,
)
from .directives import parse_directive
from .inlines import parse_inlines

Line = tuple[int, str]

_ATX = re.compile(r"^ {0,3}(#{1,6})(?:[ \t]+|$)(.*)$")
_FENCE = re.compile(r"^( {0,3})(`{3,}|~{3,})[ \t]*(.*?)[ \t]*$")
_DIRECTIVE_INFO = re.compile(r"^\{([a-zA-Z][\w:-]*)\}[ \t]*(.*)$")
_THEMATIC = re.compile(r"^ {0,3}(?:(?:\*[ \t]*){3,}|(?:-[ \t]*){3,}|(?:_[ \t]*){3,})$")
_QUOTE = re.compile(r"^ {0,3}> ?")
_LIST_ITEM = re.compile(r"^( {0,3})([-+*]|\d{1,9}[.)])(?=[ \t]|$)")
_LABEL_TARGET = re.compile(r"^ {0,3}\(([^()\s]*)\)=[ \t]*$")
_MATH_OPEN = re.compile(r"^ {0,3}\$\$")
_MATH_CLOSE = re.compile(r"\$\$[ \t]*(?:\(([^()\s]+)\))?[ \t]*$")
_TABLE_SEP = re.compile(r"^ {0,3}\|?[ \t]*:?-+:?[ \t]*(?:\|[ \t]*:?-+:?[ \t]*)*\|?[ \t]*$")
_OPTION = re.compile(r"^:([\w-]+):(?:[ \t]+(.*?))?[ \t]*$")


def _indent(text: str) -> int:
    return len(text) - len(text.lstrip(" "))


def _blank(text: str) -> bool:
    return not text.strip()


def _split_row(line: str) -> list[str]:
    row = line.strip()
    if row.startswith("|"):
        row = row[1:]
    if row.endswith("|") and not row.endswith("\\|"):
        row = row[:-1]
    cells, buf, i = [], [], 0
    while i < len(row):
        if row[i] == "\\" and i + 1 < len(row) and row[i + 1] == "|":
            buf.append("|")
            i += 2
            continue
        if row[i] == "|":
            cells.append("".join(buf).strip())
            buf = []
        else:
            buf.append(row[i])
        i += 1
    cells.append("".join(buf).strip())
    return cells


class _ListMarker:
    def __init__(self, m: re.Match[str], text: str) -> None:
        self.indent = len(m.group(1))
        marker = m.group(2)
        self.ordered = marker[-1] in ".)"
        self.kind = marker[-1]
        self.start = int(marker[:-1]) if self.ordered else 1
        rest = text[m.end() :]
        spaces = len(rest) - len(rest.lstrip(" "))
        width = self.indent + len(marker)
        self.empty = _blank(rest)
        if self.empty or spaces >= 5:
            self.content_indent = width + 1
        else:
            self.content_indent = width + spaces
        self.first = "" if self.empty else text[self.content_indent :] if spaces < 5 else rest[1:]


def _list_marker(text: str) -> _ListMarker | None:
    if _THEMATIC.match(text):
        return None
    m = _LIST_ITEM.match(text)
    return _ListMarker(m, text) if m else None


class BlockParser:
    def __init__(self, source: str, diagnostics: list[Diagnostic]) -> None:
        self.source = source
        self.diagnostics = diagnostics

    def inlines(self, text: str, line: int) -> tuple[Inline, ...]:
        nodes, diags = parse_inlines(text, line, self.source)
        self.diagnostics.extend(diags)
        return nodes

    # -- block starts -------------------------------------------------------

    def interrupts_paragraph(self, text: str) -> bool:
        if _ATX.match(text) or _FENCE.match(text) or _QUOTE.match(text) or _THEMATIC.match(text):
            return True
        if _MATH_OPEN.match(text) or _LABEL_TARGET.match(text):
            return True
        marker = _list_marker(text)
        if marker is not None and not marker.empty and (not marker.ordered or marker.start == 1):
            return True
        return False

    def starts_block(self, text: str) -> bool:
        return self.interrupts_paragraph(text) or _list_marker(text) is not None

    # -- driver -------------------------------------------------------------

    def parse(self, lines: list[Line]) -> tuple[Block, ...]:
        blocks: list[Block] = []
        pending_label: tuple[str, int] | None = None
        i = 0
        n = len(lines)
        while i < n:
            lineno, text = lines[i]
            if _blank(text):
                i += 1
                continue
            m = _LABEL_TARGET.match(text)
            if m:
                if pending_label is not None:
                    self.unattached(*pending_label)
                label = m.group(1)
                if LABEL_RE.fullmatch(label):
                    pending_label = (label, lineno)
                else:
                    self.diagnostics.append(
                        error("bad-label", f"label {label!r} must match [a-zA-Z0-9_-]+", SourceSpan(lineno, lineno), self.source)
                    )
                i += 1
                continue
            block, i = self.parse_one(lines, i)
            if block is None:
                continue
            if pending_label is not None:
                if isinstance(block, LABELLED_BLOCKS):
                    block = replace(block, label=pending_label[0])
                else:
                    self.unattached(*pending_label)
                pending_label = None
            blocks.append(block)
        if pending_label is not None:
            self.unattached(*pending_label)
        return tuple(blocks)

    def unattached(self, label: str, lineno: int) -> None:
        self.diagnostics.append(
            warning(
                "unattached-label",
                f"label {label!r} is not followed by a heading, figure or equation",
                SourceSpan(lineno, lineno),
                self.source,
            )
        )

    def parse_one(self, lines: list[Line], i: int) -> tuple[Block | None, int]:
        lineno, text = lines[i]
        m = _ATX.match(text)
        if m:
            return self.heading(m, lineno), i + 1
        m = _FENCE.match(text)
        if m and not (m.group(2)[0] == "`" and "`" in m.group(3)):
            return self.fence(lines, i, m)
        if _MATH_OPEN.match(text):
            result = self.math(lines, i)
            if result is not None:
                return result
        if "|" in text and i + 1 < len(lines) and _TABLE_SEP.match(lines[i + 1][1]):
            header = _split_row(text)
            if len(header) == len(_split_row(lines[i + 1][1])):
                return self.table(lines, i, header)
        if _QUOTE.match(text):
            return self.quote(lines, i)
        if _THEMATIC.match(text):
            return ThematicBreak(SourceSpan(lineno, lineno)), i + 1
        marker = _list_marker(text)
        if marker is not None:
            return self.list_block(lines, i)
        if _indent(text) >= 4:
            return self.indented_code(lines, i)
        return self.paragraph(lines, i)

    # -- leaf blocks --------------------------------------------------------

    def heading(self, m: re.Match[str], lineno: int) -> Heading:
        content = m.group(2).strip()
        content = re.sub(r"(?:^|[ \t]+)#+[ \t]*$", "", content).strip()
        return Heading(len(m.group(1)), self.inlines(content, lineno), SourceSpan(lineno, lineno))

    def fence(self, lines: list[Line], i: int, m: re.Match[str]) -> tuple[Block | None, int]:
        open_line = lines[i][0]
        indent = len(m.group(1))
        fence = m.group(2)
        info = m.group(3)
        body: list[Line] = []
        j = i + 1
        closed = False
        while j < len(lines):
            lineno, text = lines[j]
            stripped = text.lstrip(" ")
            if _indent(text) <= 3 and stripped.startswith(fence[0] * len(fence)) and not stripped.rstrip().strip(fence[0]):
                closed = True
                break
            # strip up to the fence's own indentation
            k = 0
            while k < indent and k < len(text) and text[k] == " ":
                k += 1
            body.append((lineno, text[k:]))
            j += 1
        end_line = lines[j][0] if closed else (lines[-1][0] if j > i + 1 else open_line)
        if not closed:
            self.diagnostics.append(
                error("unclosed-fence", "code fence is never closed", SourceSpan(open_line, open_line), self.source)
            )
        span = SourceSpan(open_line, end_line)
        nxt = j + 1 if closed else j
        directive = _DIRECTIVE_INFO.match(info)
        if directive:
            block = self.directive(directive.group(1), directive.group(2).strip(), body, span)
            return block, nxt
        language = info.split()[0] if info else None
        return CodeBlock(language, "\n".join(t for _, t in body), span), nxt

    def directive(self, name: str, argument: str, body: list[Line], span: SourceSpan) -> Block | None:
        k = 0
        options: list[str] = []
        while k < len(body) and _OPTION.match(body[k][1]):
            options.append(body[k][1])
            k += 1
        if options and k < len(body) and _blank(body[k][1]):
            k += 1
        rest = body[k:]
        body_line = rest[0][0] if rest else span.end_line
        block, diags = parse_directive(
            name,
            argument,
            "\n".join(options),
            "\n".join(t for _, t in rest),
            span=span,
            body_line=body_line,
            source=self.source,
            lines=rest,
        )
        self.diagnostics.extend(diags)
        return block

    def math(self, lines: list[Line], i: int) -> tuple[Block, int] | None:
        lineno, text = lines[i]
        first = text.lstrip(" ")[2:]
        m = _MATH_CLOSE.search(first)
        if m and first[: m.start()].strip():
            return MathBlock(first[: m.start()].strip(), SourceSpan(lineno, lineno), m.group(1)), i + 1
        parts = [first] if first.strip() else []
        j = i + 1
        while j < len(lines):
            ln, t = lines[j]
            m = _MATH_CLOSE.search(t)
            if m:
                parts.append(t[: m.start()])
                return MathBlock("\n".join(parts).strip(), SourceSpan(lineno, ln), m.group(1)), j + 1
            if _blank(t):
                break
            parts.append(t)
            j += 1
        return None

    def table(self, lines: list[Line], i: int, header: list[str]) -> tuple[Table, int]:
        ncols = len(header)
        head = tuple(self.inlines(cell, lines[i][0]) for cell in header)
        rows = []
        j = i + 2
        while j < len(lines):
            lineno, text = lines[j]
            if _blank(text) or "|" not in text or self.starts_block(text):
                break
            cells = _split_row(text)
            cells = (cells + [""] * ncols)[:ncols]
            rows.append(tuple(self.inlines(c, lineno) for c in cells))
            j += 1
        return Table(head, tuple(rows), SourceSpan(lines[i][0], lines[j - 1][0])), j

    def indented_code(self, lines: list[Line], i: int) -> tuple[CodeBlock, int]:
        body: list[Line] = []
        j = i
        while j < len(lines) and (_blank(lines[j][1]) or _indent(lines[j][1]) >= 4):
            body.append((lines[j][0], lines[j][1][4:]))
            j += 1
        while body and _blank(body[-1][1]):
            body.pop()
            j -= 1
        source = "\n".join(t for _, t in body)
        return CodeBlock(None, source, SourceSpan(body[0][0], body[-1][0])), i + len(body)

    def paragraph(self, lines: list[Line], i: int) -> tuple[Paragraph | None, int]:
        start = lines[i][0]
        parts = [lines[i][1].strip()]
        j = i + 1
        while j < len(lines):
            text = lines[j][1]
            if _blank(text) or self.interrupts_paragraph(text):
                break
            if "|" in text and j + 1 < len(lines) and _TABLE_SEP.match(lines[j + 1][1]):
                break
            parts.append(text.strip())
            j += 1
        joined = "\n".join(parts)
        return Paragraph(self.inlines(joined, start), SourceSpan(start, lines[j - 1][0])), j

    # -- container blocks ---------------------------------------------------

    def quote(self, lines: list[Line], i: int) -> tuple[BlockQuote, int]:
        inner: list[Line] = []
        j = i
        while j < len(lines):
            lineno, text = lines[j]
            m = _QUOTE.match(text)
            if m:
                inner.append((lineno, text[m.end() :]))
            elif (
                not _blank(text)
                and inner
                and not _blank(inner[-1][1])
                and not self.starts_block(text)
                and not self.open_fence(inner)
            ):
                inner.append((lineno, text))  # lazy continuation
            else:
                break
            j += 1
        children = BlockParser(self.source, self.diagnostics).parse(inner)
        return BlockQuote(children, SourceSpan(lines[i][0], lines[j - 1][0])), j

    @staticmethod
    def open_fence(body: list[Line]) -> bool:
        from .cells import FenceTracker

        tracker = FenceTracker()
        for lineno, text in body:
            tracker.feed(text, lineno)
        return tracker.open

    def list_block(self, lines: list[Line], i: int) -> tuple[ListBlock, int]:
        first = _list_marker(lines[i][1])
        assert first is not None
        items: list[ListItem] = []
        loose = False
        j = i
        while j < len(lines):
            marker = _list_marker(lines[j][1])
            if marker is None or marker.ordered != first.ordered or marker.kind != first.kind:
                break
            item_lines: list[Line] = [(lines[j][0], marker.first)]
            k = j + 1
            if marker.empty and k < len(lines) and _blank(lines[k][1]):
                pass  # an item may begin with at most one blank line
            else:
                while k < len(lines):
                    lineno, text = lines[k]
                    if _blank(text):
                        item_lines.append((lineno, ""))
                    elif _indent(text) >= marker.content_indent:
                        item_lines.append((lineno, text[marker.content_indent :]))
                    elif (
                        item_lines
                        and not _blank(item_lines[-1][1])
                        and not self.starts_block(text)
                        and not self.open_fence(item_lines)
                        and not self.ends_with_fence_or_code(item_lines)
                    ):
                        item_lines.append((lineno, text))  # lazy continuation
                    else:
                        break
                    k += 1
            # trailing blank lines belong between items, not to this one
            trailing = 0
            while len(item_lines) > 1 and _blank(item_lines[-1][1]):
                item_lines.pop()
                trailing += 1
            content = item_lines if not marker.empty or len(item_lines) > 1 else []
            if marker.empty and content:
                content = content[1:]
            children = BlockParser(self.source, self.diagnostics).parse(content)
            if self.has_inner_gap(children, item_lines):
                loose = True
            span = SourceSpan(lines[j][0], item_lines[-1][0] if item_lines else lines[j][0])
            items.append(ListItem(children, span))
            j = k
            look = j
            while look < len(lines) and _blank(lines[look][1]):
                look += 1
            nxt = _list_marker(lines[look][1]) if look < len(lines) else None
            if nxt is None or nxt.ordered != first.ordered or nxt.kind != first.kind:
                break
            if look > j or trailing:
                loose = True
            j = look
        span = SourceSpan(lines[i][0], items[-1].span.end_line)
        return ListBlock(first.ordered, tuple(items), span, first.start, not loose), j

    def ends_with_fence_or_code(self, item_lines: list[Line]) -> bool:
        # lazy continuation only extends paragraphs
        last = item_lines[-1][1]
        return bool(_FENCE.match(last) or _indent(last) >= 4 or _ATX.match(last) or _THEMATIC.match(last))

    @staticmethod
    def has_inner_gap(children: tuple[Block, ...], item_lines: list[Line]) -> bool:
        blank_lines = {ln for ln, t in item_lines if _blank(t)}
        for a, b in zip(children, children[1:]):
            if any(ln in blank_lines for ln in range(a.span.end_line + 1, b.span.start_line)):
                return True
        return False


def parse_blocks(
    text: str, first_line: int = 1, source: str = "<string>"
) -> tuple[tuple[Block, ...], list[Diagnostic]]:
    """Parse one fragment body into blocks; ``first_line`` is the file line of its first line."""
    diagnostics: list[Diagnostic] = []
    lines = [(first_line + k, t) for k, t in enumerate(text.split("\n"))] if text else []
    blocks = BlockParser(source, diagnostics).parse(lines)
    return blocks, diagnostics


def parse_lines(lines: list[Line], source: str, diagnostics: list[Diagnostic]) -> tuple[Block, ...]:
    return BlockParser(source, diagnostics).parse(lines)
