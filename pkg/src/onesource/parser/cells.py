from __future__ import annotations

from dataclasses import dataclass
import re

from ..diagnostics import Diagnostic, error
from ..nodes import SourceSpan

_FENCE_OPEN = re.compile(r"^ {0,3}(`{3,}|~{3,})(.*)$")
_BREAK = re.compile(r"^\+\+\+(.*)$")


@dataclass(frozen=True, slots=True)
class RawFragment:
    text: str
    span: SourceSpan
    tags_json: str | None = None
    break_line: int | None = None


class FenceTracker:
    """Line-at-a-time tracker of CommonMark fenced code blocks."""

    def __init__(self) -> None:
        self.char = ""
        self.length = 0
        self.indent = 0
        self.opened_at: int | None = None

    @property
    def open(self) -> bool:
        return self.opened_at is not None

    def feed(self, line: str, lineno: int) -> None:
        if self.open:
            stripped = line.lstrip(" ")
            if (
                len(line) - len(stripped) <= 3
                and stripped.startswith(self.char * self.length)
                and not stripped.rstrip().strip(self.char)
            ):
                self.opened_at = None
            return
        m = _FENCE_OPEN.match(line)
        if m and not (m.group(1)[0] == "`" and "`" in m.group(2)):
            self.char = m.group(1)[0]
            self.length = len(m.group(1))
            self.opened_at = lineno


def split_cells(
    text: str, first_line: int = 1, source: str = "<string>"
) -> tuple[list[RawFragment], list[Diagnostic]]:
    """Split a frontmatter-free body on ``+++`` lines outside code fences.

    ``first_line`` is the file line number of the first line of ``text``.
    Whitespace-only segments are dropped.
    """
    lines = text.split("\n")
    fragments: list[RawFragment] = []
    fence = FenceTracker()
    seg_start = 0
    pending_json: str | None = None
    pending_break: int | None = None

    def flush(end: int) -> None:
        # lines[seg_start:end] form one segment; surrounding blank lines are trimmed
        lo, hi = seg_start, end
        while lo < hi and not lines[lo].strip():
            lo += 1
        while hi > lo and not lines[hi - 1].strip():
            hi -= 1
        if hi > lo:
            fragments.append(
                RawFragment(
                    "\n".join(lines[lo:hi]),
                    SourceSpan(first_line + lo, first_line + hi - 1),
                    pending_json,
                    pending_break,
                )
            )

    for i, line in enumerate(lines):
        if not fence.open:
            m = _BREAK.match(line)
            if m:
                flush(i)
                seg_start = i + 1
                meta = m.group(1).strip()
                pending_json = meta or None
                pending_break = first_line + i
                continue
        fence.feed(line, first_line + i)
    flush(len(lines))

    diagnostics = []
    if fence.open:
        assert fence.opened_at is not None
        diagnostics.append(
            error(
                "unclosed-fence",
                "code fence is never closed; the rest of the file is treated as code",
                SourceSpan(fence.opened_at, fence.opened_at),
                source,
            )
        )
    return fragments, diagnostics
