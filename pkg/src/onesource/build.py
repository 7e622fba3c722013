"""Build orchestration: parse everything, collect diagnostics, then write."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
import shutil
import tempfile

from .assets import asset_name, collect_assets, is_external
from .bibliography import BibEntry, CitationMap, parse_bibtex, resolve_citations
from .book import build_site, page_names
from .config import Config
from .diagnostics import Diagnostic, Severity, error, has_errors, info, warning
from .filtering import filter_for_target, skipped_everywhere
from .nodes import CiteRole, Document, Figure, SlideType, SourceSpan, Target, document_blocks, document_inlines
from .notebook import serialize_notebook, to_notebook
from .parser import parse_source
from .slides import partition_slides, render_deck
from .xref import LabelTable, collect_labels, labels_in, resolve_references

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2


@dataclass
class Project:
    documents: list[Document]
    entries: list[BibEntry]
    labels: LabelTable
    citations: CitationMap
    assets: dict[str, bytes]
    diagnostics: list[Diagnostic] = field(default_factory=list)


@dataclass
class BuildReport:
    outputs: dict[Target, list[Path]] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    exit_status: int = EXIT_OK

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]


def _read(path: Path, config: Config) -> tuple[str | None, list[Diagnostic]]:
    try:
        return path.read_text(encoding="utf-8"), []
    except (OSError, UnicodeDecodeError) as exc:
        return None, [error("io-error", f"cannot read {path.name}: {exc}", SourceSpan(1, 1), config.source_name(path))]


def load_project(config: Config) -> Project:
    """Parse sources and bibliographies, then collect labels, citations and assets."""
    diagnostics: list[Diagnostic] = []
    documents = []
    for path in config.sources:
        text, diags = _read(path, config)
        diagnostics += diags
        if text is None:
            continue
        doc, diags = parse_source(text, config.source_name(path))
        documents.append(doc)
        diagnostics += diags
    entries: list[BibEntry] = []
    for path in config.bibliography:
        text, diags = _read(path, config)
        diagnostics += diags
        if text is None:
            continue
        found, diags = parse_bibtex(text, config.source_name(path))
        diagnostics += diags
        known = {e.key for e in entries}
        for entry in found:
            if entry.key in known:
                diagnostics.append(
                    error("duplicate-key", f"key {entry.key!r} already defined", SourceSpan(entry.line, entry.line), entry.source)
                )
            else:
                entries.append(entry)
    labels, diags = collect_labels(documents)
    diagnostics += diags
    citations, diags = resolve_citations(documents, entries)
    diagnostics += diags
    assets, diags = collect_assets(documents, config.root)
    diagnostics += diags
    return Project(documents, entries, labels, citations, assets, diagnostics)


def _drop_slide_skips(doc: Document) -> Document:
    return replace(doc, fragments=tuple(f for f in doc.fragments if f.slide_type is not SlideType.SKIP))


def _resolve_all(
    documents: Sequence[Document], labels: LabelTable, href, available: set[str]
) -> tuple[list[Document], list[Diagnostic]]:
    out, diagnostics = [], []
    for doc in documents:
        resolved, diags = resolve_references(doc, labels, href=href, available=available)
        out.append(resolved)
        diagnostics += diags
    return out, diagnostics


def render_target(project: Project, config: Config, target: Target) -> tuple[dict[str, bytes], list[Diagnostic]]:
    """Files (relative to the target's output directory) for one target, plus its diagnostics."""
    filtered = [filter_for_target(d, target) for d in project.documents]
    if target is Target.BOOK:
        names = page_names(filtered)
        docs, diags = _resolve_all(
            filtered,
            project.labels,
            lambda e: f"{names[e.source_name]}#{e.anchor}",
            labels_in(filtered),
        )
        files = build_site(docs, config, project.labels, project.citations, _assets_for(project, docs)).files()
        return files, diags
    if target is Target.NOTEBOOK:
        docs, diags = _resolve_all(filtered, project.labels, None, labels_in(filtered))
        files = {}
        taken: set[str] = set()
        for doc in docs:
            nb = to_notebook(
                doc,
                kernel_name=config.kernel_name,
                kernel_language=config.kernel_language,
                labels=project.labels,
                citations=project.citations,
            )
            name, n = f"{doc.stem or 'notebook'}.ipynb", 2
            while name in taken:
                name, n = f"{doc.stem or 'notebook'}-{n}.ipynb", n + 1
            taken.add(name)
            files[name] = serialize_notebook(nb)
        files.update(_assets_for(project, docs))
        return files, diags
    on_deck = [_drop_slide_skips(d) for d in filtered]
    docs, diags = _resolve_all(on_deck, project.labels, lambda e: f"#{e.anchor}", labels_in(on_deck))
    deck, partition_diags = partition_slides(docs, title=config.title, authors=config.authors)
    html = render_deck(deck, config, labels=project.labels, citations=project.citations)
    files = {"index.html": html.encode("utf-8")}
    files.update(_assets_for(project, docs))
    return files, diags + partition_diags


def _assets_for(project: Project, documents: Iterable[Document]) -> dict[str, bytes]:
    """Only the assets still referenced after filtering."""
    wanted = {
        asset_name(doc.source_name, b.target)
        for doc in documents
        for b in document_blocks(doc)
        if isinstance(b, Figure) and not is_external(b.target)
    }
    return {k: v for k, v in project.assets.items() if k in wanted}


def _promote(diagnostics: list[Diagnostic], strict: bool) -> list[Diagnostic]:
    if not strict:
        return diagnostics
    return [replace(d, severity=Severity.ERROR) if d.severity is Severity.WARNING else d for d in diagnostics]


def _dedupe(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return list(dict.fromkeys(diagnostics))


def _write_tree(dest: Path, files: dict[str, bytes]) -> list[Path]:
    """Replace ``dest`` by exactly ``files``; the old tree survives until the new one is complete."""
    dest.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{dest.name}-", dir=dest.parent))
    try:
        staging.chmod(0o755)
        for rel, data in sorted(files.items()):
            path = staging / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        if dest.exists():
            shutil.rmtree(dest)
        staging.rename(dest)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return [dest / rel for rel in sorted(files)]


def cmd_build(
    config: Config,
    targets: Sequence[Target | str] | None = None,
    out_dir: Path | None = None,
    strict: bool | None = None,
) -> BuildReport:
    """Build the selected targets; nothing is written for a target while any error exists."""
    selected = [Target(t) for t in targets] if targets else list(config.targets)
    strict = config.strict if strict is None else strict
    out = Path(out_dir) if out_dir is not None else config.out_dir
    project = load_project(config)
    diagnostics = list(project.diagnostics)
    rendered: dict[Target, dict[str, bytes]] = {}
    for target in selected:
        files, diags = render_target(project, config, target)
        diagnostics += diags
        rendered[target] = files
    report = BuildReport(diagnostics=_promote(_dedupe(diagnostics), strict))
    if has_errors(report.diagnostics):
        report.exit_status = EXIT_ERRORS
        return report
    for target in selected:
        try:
            report.outputs[target] = _write_tree(out / target.value, rendered[target])
        except OSError as exc:
            report.diagnostics.append(
                error("io-error", f"cannot write {target.value} output: {exc}", SourceSpan(1, 1), out.as_posix())
            )
            report.exit_status = EXIT_ERRORS
    return report


def cmd_check(config: Config, strict: bool | None = None) -> BuildReport:
    """Run every stage without writing, plus lint-only findings."""
    strict = config.strict if strict is None else strict
    project = load_project(config)
    diagnostics = list(project.diagnostics)
    for target in Target:
        diagnostics += render_target(project, config, target)[1]
    for doc in project.documents:
        for fragment in doc.fragments:
            if skipped_everywhere(fragment):
                diagnostics.append(
                    warning("dead-content", "fragment is skipped by every target", fragment.span, doc.source_name)
                )
    cited = {k for doc in project.documents for n in document_inlines(doc) if isinstance(n, CiteRole) for k in n.keys}
    for entry in project.entries:
        if entry.key not in cited:
            diagnostics.append(
                info("uncited-entry", f"entry {entry.key!r} is never cited", SourceSpan(entry.line, entry.line), entry.source)
            )
    report = BuildReport(diagnostics=_promote(_dedupe(diagnostics), strict))
    report.exit_status = EXIT_ERRORS if has_errors(report.diagnostics) else EXIT_OK
    return report
