from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path, PurePosixPath
import re

from .diagnostics import Diagnostic, error
from .nodes import Document, Figure, document_blocks

ASSET_DIR = "assets"
_URL = re.compile(r"^[a-zA-Z][a-zA-Z0-9+.-]*:")


def is_external(target: str) -> bool:
    return bool(_URL.match(target)) or target.startswith("//")


def asset_name(source_name: str, target: str) -> str:
    """Bundle-relative path (``assets/...``) for a figure referenced from ``source_name``.

    Parent-directory hops are dropped so the result never escapes the bundle.
    """
    joined = PurePosixPath(source_name).parent / target.replace("\\", "/")
    parts: list[str] = []
    for part in joined.parts:
        if part in ("", ".", "/"):
            continue
        if part == "..":
            if parts:
                parts.pop()
            continue
        parts.append(part)
    return "/".join([ASSET_DIR, *parts])


def asset_url(source_name: str, target: str) -> str:
    return target if is_external(target) else asset_name(source_name, target)


def collect_assets(documents: Iterable[Document], root: Path) -> tuple[dict[str, bytes], list[Diagnostic]]:
    """Read every local figure file referenced by ``documents``; keys are bundle-relative paths."""
    assets: dict[str, bytes] = {}
    diagnostics: list[Diagnostic] = []
    for doc in documents:
        base = (root / doc.source_name).parent
        for block in document_blocks(doc):
            if not isinstance(block, Figure) or is_external(block.target):
                continue
            name = asset_name(doc.source_name, block.target)
            if name in assets:
                continue
            try:
                assets[name] = (base / block.target).read_bytes()
            except OSError:
                diagnostics.append(
                    error("missing-asset", f"figure file {block.target!r} not found", block.span, doc.source_name)
                )
    return dict(sorted(assets.items())), diagnostics
