"""Diagnostics reported by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .nodes import SourceSpan

# code -> one-line meaning; codes outside this registry are a programming error
CODES = {
    "bad-frontmatter": "frontmatter is not a flat key/value map",
    "unclosed-fence": "code fence never closes",
    "bad-cell-metadata": "cell break carries invalid JSON metadata",
    "bad-slide-type": "unknown slide type",
    "unknown-tag": "tag outside the reserved vocabulary without an x- prefix",
    "duplicate-tag": "tag listed twice",
    "unknown-directive": "directive name not recognised",
    "missing-argument": "directive requires an argument",
    "bad-label": "label is not made of [a-zA-Z0-9_-]",
    "unattached-label": "label target not followed by a labellable block",
    "empty-role": "role without content",
    "unknown-role": "role name not recognised",
    "duplicate-key": "BibTeX key defined twice",
    "unbalanced-braces": "BibTeX entry has unbalanced braces",
    "bib-ignored": "BibTeX construct ignored",
    "missing-author": "BibTeX entry has no author field",
    "dangling-citation": "cited key not in any bibliography",
    "duplicate-label": "label defined twice",
    "dangling-reference": "reference to an undefined label",
    "wrong-reference-kind": "{eq} role pointing at something other than an equation",
    "subslide-before-slide": "subslide without an enclosing slide",
    "dead-content": "fragment skipped by every target",
    "uncited-entry": "bibliography entry never cited",
    "missing-asset": "figure file not found",
    "config": "configuration problem",
    "unknown-target": "target name outside book, notebook, slides",
    "io-error": "file could not be read or written",
}


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan
    source: str = "<string>"

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unregistered diagnostic code {self.code!r}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def format(self) -> str:
        return (
            f"{self.source}:{self.span.start_line}: "
            f"{self.severity.value}[{self.code}]: {self.message}"
        )

    def with_source(self, source: str) -> Diagnostic:
        return replace(self, source=source)


def error(code: str, message: str, span: SourceSpan, source: str = "<string>") -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span, source)


def warning(code: str, message: str, span: SourceSpan, source: str = "<string>") -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span, source)


def info(code: str, message: str, span: SourceSpan, source: str = "<string>") -> Diagnostic:
    return Diagnostic(Severity.INFO, code, message, span, source)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)
