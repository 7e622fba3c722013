"""Inline parsing: emphasis, code spans, links, images, math and roles.

Emphasis follows the CommonMark delimiter-run algorithm (flanking rules and
the rule of three).  Everything that fails to match falls back to literal
text.
"""

from __future__ import annotations

from dataclasses import dataclass
import html
import re
import string
import unicodedata

from ..diagnostics import Diagnostic, warning
from ..nodes import (
    CiteRole,
    CodeSpan,
    Emph,
    EqRole,
    Image,
    Inline,
    Link,
    MathInline,
    RefRole,
    SourceSpan,
    Strong,
    Text,
    plain_text,
)

ASCII_PUNCT = frozenset(string.punctuation)
_ROLE = re.compile(r"\{([a-zA-Z][\w:+.-]*)\}(`+)")
_ENTITY = re.compile(r"&(?:#[0-9]{1,7}|#[xX][0-9a-fA-F]{1,6}|[a-zA-Z][a-zA-Z0-9]{1,31});")
_AUTOLINK = re.compile(r"<([a-zA-Z][a-zA-Z0-9+.-]{1,31}:[^\s<>\x00-\x1f]*)>")
_REF_WITH_TEXT = re.compile(r"^(.*?)\s*<([^<>]+)>$", re.S)

CITE_ROLES = {"cite", "cite:p", "cite:t", "cite:ps", "cite:ts"}
REF_ROLES = {"ref", "numref"}


def _is_ws(ch: str) -> bool:
    return ch == "" or ch.isspace()


def _is_punct(ch: str) -> bool:
    return ch != "" and (ch in ASCII_PUNCT or unicodedata.category(ch).startswith(("P", "S")))


@dataclass
class _Delim:
    char: str
    count: int
    orig: int
    can_open: bool
    can_close: bool
    pos: int


@dataclass
class _Chunk:
    # literal text with the offset of its first character
    text: str
    pos: int


class _InlineParser:
    def __init__(self, text: str, line: int, source: str, diagnostics: list[Diagnostic]) -> None:
        self.text = text
        self.line = line
        self.source = source
        self.diagnostics = diagnostics

    def line_at(self, pos: int) -> int:
        return self.line + self.text.count("\n", 0, max(pos, 0))

    def span(self, start: int, end: int) -> SourceSpan:
        # end is exclusive
        return SourceSpan(self.line_at(start), self.line_at(max(start, end - 1)))

    # -- scanning -----------------------------------------------------------

    def parse(self, start: int = 0, end: int | None = None) -> list[Inline]:
        items = self.scan(start, len(self.text) if end is None else end)
        self.process_emphasis(items)
        return self.finish(items)

    def scan(self, start: int, end: int) -> list[object]:
        text = self.text
        items: list[object] = []
        buf: list[str] = []
        buf_pos = start

        def flush(at: int) -> None:
            nonlocal buf, buf_pos
            if buf:
                items.append(_Chunk("".join(buf), buf_pos))
            buf = []
            buf_pos = at

        i = start
        while i < end:
            ch = text[i]
            if ch == "\\" and i + 1 < end and text[i + 1] in ASCII_PUNCT:
                if not buf:
                    buf_pos = i
                buf.append(text[i + 1])
                i += 2
                continue
            if ch == "{":
                m = _ROLE.match(text, i, end)
                if m:
                    close = self.find_backticks(m.end(), end, len(m.group(2)))
                    if close is not None:
                        flush(i)
                        content = text[m.end() : close]
                        node = self.make_role(m.group(1), content, i, close + len(m.group(2)))
                        if node is not None:
                            items.append(node)
                        i = close + len(m.group(2))
                        buf_pos = i
                        continue
            if ch == "`":
                run = self.run_length(i, end, "`")
                close = self.find_backticks(i + run, end, run)
                if close is None:
                    if not buf:
                        buf_pos = i
                    buf.append("`" * run)
                    i += run
                    continue
                flush(i)
                items.append(CodeSpan(self.code_content(text[i + run : close]), self.span(i, close + run)))
                i = close + run
                buf_pos = i
                continue
            if ch == "$":
                close = self.find_math_close(i, end)
                if close is not None:
                    flush(i)
                    items.append(MathInline(text[i + 1 : close], self.span(i, close + 1)))
                    i = close + 1
                    buf_pos = i
                    continue
            if ch == "!" and i + 1 < end and text[i + 1] == "[":
                parsed = self.try_link(i + 1, end)
                if parsed is not None:
                    label_start, label_end, url, after = parsed
                    flush(i)
                    alt = plain_text(_InlineParser(text, self.line, self.source, self.diagnostics).parse(label_start, label_end))
                    items.append(Image(url, alt, self.span(i, after)))
                    i = after
                    buf_pos = i
                    continue
            if ch == "[":
                parsed = self.try_link(i, end)
                if parsed is not None:
                    label_start, label_end, url, after = parsed
                    flush(i)
                    children = self.parse(label_start, label_end)
                    items.append(Link(url, tuple(children), self.span(i, after)))
                    i = after
                    buf_pos = i
                    continue
            if ch == "<":
                m = _AUTOLINK.match(text, i, end)
                if m:
                    flush(i)
                    url = m.group(1)
                    items.append(Link(url, (Text(url, self.span(i, m.end())),), self.span(i, m.end())))
                    i = m.end()
                    buf_pos = i
                    continue
            if ch == "&":
                m = _ENTITY.match(text, i, end)
                if m:
                    decoded = html.unescape(m.group(0))
                    if decoded != m.group(0):
                        if not buf:
                            buf_pos = i
                        buf.append(decoded)
                        i = m.end()
                        continue
            if ch in "*_":
                run = self.run_length(i, end, ch)
                flush(i)
                items.append(self.make_delim(ch, i, run, start, end))
                i += run
                buf_pos = i
                continue
            if not buf:
                buf_pos = i
            buf.append(ch)
            i += 1
        flush(end)
        return items

    def run_length(self, i: int, end: int, ch: str) -> int:
        j = i
        while j < end and self.text[j] == ch:
            j += 1
        return j - i

    def find_backticks(self, i: int, end: int, run: int) -> int | None:
        """Offset of the next backtick string of exactly ``run`` characters."""
        text = self.text
        while i < end:
            j = text.find("`", i, end)
            if j < 0:
                return None
            k = self.run_length(j, end, "`")
            if k == run:
                return j
            i = j + k
        return None

    @staticmethod
    def code_content(raw: str) -> str:
        content = raw.replace("\n", " ")
        if len(content) >= 2 and content[0] == " " and content[-1] == " " and content.strip(" "):
            content = content[1:-1]
        return content

    def find_math_close(self, i: int, end: int) -> int | None:
        text = self.text
        if i + 1 >= end or text[i + 1] in " \t\n$":
            return None
        j = i + 1
        while j < end:
            ch = text[j]
            if ch == "\\":
                j += 2
                continue
            if ch == "$":
                if text[j - 1] in " \t\n":
                    return None
                if j + 1 < end and text[j + 1].isdigit():
                    return None
                return j
            j += 1
        return None

    def try_link(self, i: int, end: int) -> tuple[int, int, str, int] | None:
        """Match ``[label](dest "title")`` at ``i``; returns label bounds, url, end offset."""
        text = self.text
        depth = 0
        j = i
        close = None
        while j < end:
            ch = text[j]
            if ch == "\\":
                j += 2
                continue
            if ch == "`":
                run = self.run_length(j, end, "`")
                k = self.find_backticks(j + run, end, run)
                j = (k + run) if k is not None else j + run
                continue
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
                if depth == 0:
                    close = j
                    break
            j += 1
        if close is None or close + 1 >= end or text[close + 1] != "(":
            return None
        j = close + 2
        while j < end and text[j] in " \t\n":
            j += 1
        if j < end and text[j] == "<":
            k = text.find(">", j + 1, end)
            if k < 0 or "\n" in text[j + 1 : k]:
                return None
            url = text[j + 1 : k]
            j = k + 1
        else:
            parens = 0
            k = j
            while k < end:
                ch = text[k]
                if ch == "\\" and k + 1 < end and text[k + 1] in ASCII_PUNCT:
                    k += 2
                    continue
                if ch.isspace() or ord(ch) < 0x20:
                    break
                if ch == "(":
                    parens += 1
                elif ch == ")":
                    if parens == 0:
                        break
                    parens -= 1
                k += 1
            if parens:
                return None
            url = re.sub(r"\\([%s])" % re.escape(string.punctuation), r"\1", text[j:k])
            j = k
        while j < end and text[j] in " \t\n":
            j += 1
        if j < end and text[j] in "\"'(":
            closer = ")" if text[j] == "(" else text[j]
            k = j + 1
            while k < end and text[k] != closer:
                k += 2 if text[k] == "\\" else 1
            if k >= end:
                return None
            j = k + 1
            while j < end and text[j] in " \t\n":
                j += 1
        if j >= end or text[j] != ")":
            return None
        return i + 1, close, html.unescape(url), j + 1

    def make_delim(self, ch: str, i: int, run: int, start: int, end: int) -> _Delim:
        before = self.text[i - 1] if i > start else ""
        after = self.text[i + run] if i + run < end else ""
        left = not _is_ws(after) and (not _is_punct(after) or _is_ws(before) or _is_punct(before))
        right = not _is_ws(before) and (not _is_punct(before) or _is_ws(after) or _is_punct(after))
        if ch == "*":
            can_open, can_close = left, right
        else:
            can_open = left and (not right or _is_punct(before))
            can_close = right and (not left or _is_punct(after))
        return _Delim(ch, run, run, can_open, can_close, i)

    def make_role(self, name: str, content: str, start: int, end: int) -> Inline | None:
        span = self.span(start, end)
        content = content.strip()
        if not content:
            self.diagnostics.append(warning("empty-role", f"role {{{name}}} has no content", span, self.source))
            return Text(self.text[start:end], span)
        if name in CITE_ROLES:
            keys = tuple(k.strip() for k in content.split(",") if k.strip())
            if not keys:
                self.diagnostics.append(warning("empty-role", "citation role lists no keys", span, self.source))
                return Text(self.text[start:end], span)
            return CiteRole(keys, span)
        if name in REF_ROLES or name == "eq":
            m = _REF_WITH_TEXT.match(content)
            label = m.group(2).strip() if m else content
            return EqRole(label, span) if name == "eq" else RefRole(label, span)
        if name == "math":
            return MathInline(content, span)
        self.diagnostics.append(warning("unknown-role", f"unknown role {{{name}}}", span, self.source))
        return CodeSpan(content, span)

    # -- emphasis -----------------------------------------------------------

    def process_emphasis(self, items: list[object]) -> None:
        k = 0
        while k < len(items):
            closer = items[k]
            if not (isinstance(closer, _Delim) and closer.can_close and closer.count):
                k += 1
                continue
            j = k - 1
            opener = None
            while j >= 0:
                cand = items[j]
                if (
                    isinstance(cand, _Delim)
                    and cand.char == closer.char
                    and cand.can_open
                    and cand.count
                    and not (
                        (cand.can_close or closer.can_open)
                        and (cand.orig + closer.orig) % 3 == 0
                        and not (cand.orig % 3 == 0 and closer.orig % 3 == 0)
                    )
                ):
                    opener = cand
                    break
                j -= 1
            if opener is None:
                k += 1
                continue
            use = 2 if opener.count >= 2 and closer.count >= 2 else 1
            inner = self.finish(items[j + 1 : k])
            span = SourceSpan(self.line_at(opener.pos), self.line_at(closer.pos))
            node = Strong(tuple(inner), span) if use == 2 else Emph(tuple(inner), span)
            opener.count -= use
            closer.count -= use
            # also advance the closer's offset so that leftover characters keep sane spans
            closer.pos += use
            items[j + 1 : k] = [node]
            k = j + 2
            if opener.count == 0:
                del items[j]
                k -= 1
            if closer.count == 0:
                del items[k]

    def finish(self, items: list[object]) -> list[Inline]:
        out: list[Inline] = []
        for item in items:
            if isinstance(item, _Chunk):
                node: Inline = Text(item.text, self.span(item.pos, item.pos + len(item.text)))
            elif isinstance(item, _Delim):
                if not item.count:
                    continue
                node = Text(item.char * item.count, self.span(item.pos, item.pos + item.count))
            else:
                node = item  # type: ignore[assignment]
            if isinstance(node, Text) and out and isinstance(out[-1], Text):
                prev = out[-1]
                out[-1] = Text(
                    prev.text + node.text,
                    SourceSpan(prev.span.start_line, max(prev.span.end_line, node.span.end_line)),
                )
            elif not (isinstance(node, Text) and not node.text):
                out.append(node)
        return out


def parse_inlines(text: str, line: int = 1, source: str = "<string>") -> tuple[tuple[Inline, ...], list[Diagnostic]]:
    """Parse inline markdown; ``line`` is the file line of the first character."""
    diagnostics: list[Diagnostic] = []
    if not text:
        return (), diagnostics
    inlines = _InlineParser(text, line, source, diagnostics).parse()
    return tuple(inlines), diagnostics
