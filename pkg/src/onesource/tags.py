from __future__ import annotations

from collections.abc import Iterable

from .diagnostics import Diagnostic, warning
from .nodes import RESERVED_TAGS, USER_TAG_PREFIX, SourceSpan, TagSet

_NOWHERE = SourceSpan(1, 1)


def validate_tagset(
    raw: Iterable[str],
    span: SourceSpan = _NOWHERE,
    source: str = "<string>",
) -> tuple[TagSet, list[Diagnostic]]:
    """Build a TagSet from raw tag strings.

    Reserved tags and ``x-`` user tags are kept once each. Every duplicate and
    every unrecognised tag yields one warning; the caller decides whether
    warnings are fatal.
    """
    seen: set[str] = set()
    diagnostics: list[Diagnostic] = []
    for tag in raw:
        if tag in seen:
            diagnostics.append(warning("duplicate-tag", f"tag {tag!r} listed more than once", span, source))
            continue
        seen.add(tag)
        if tag not in RESERVED_TAGS and not (tag.startswith(USER_TAG_PREFIX) and len(tag) > len(USER_TAG_PREFIX)):
            diagnostics.append(
                warning(
                    "unknown-tag",
                    f"unknown tag {tag!r}; use one of {sorted(RESERVED_TAGS)} or an x- prefix",
                    span,
                    source,
                )
            )
    kept = frozenset(t for t in seen if t in RESERVED_TAGS or (t.startswith(USER_TAG_PREFIX) and len(t) > 2))
    return TagSet(kept), diagnostics
