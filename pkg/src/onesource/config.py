"""Loading of the ``publish.yml`` build configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .diagnostics import Diagnostic, error, warning
from .nodes import SourceSpan, Target

DEFAULT_CONFIG = "publish.yml"
DEFAULT_OUT_DIR = "_build"
DEFAULT_RUNTIME_URL = "https://cdn.jsdelivr.net/npm/reveal.js@5.1.0"
DEFAULT_MATH_URL = "https://cdn.jsdelivr.net/npm/mathjax@3.2.2/es5/tex-chtml.js"

_TOP_KEYS = {
    "title",
    "authors",
    "sources",
    "bibliography",
    "targets",
    "out_dir",
    "kernel",
    "slides",
    "math_renderer_url",
    "strict",
}
_NESTED_KEYS = {"kernel": {"name", "language"}, "slides": {"runtime_base_url", "theme"}}


@dataclass
class Config:
    sources: list[Path]
    root: Path = field(default_factory=Path.cwd)
    title: str | None = None
    authors: list[str] = field(default_factory=list)
    bibliography: list[Path] = field(default_factory=list)
    targets: list[Target] = field(default_factory=lambda: list(Target))
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    kernel_name: str = "python3"
    kernel_language: str = "python"
    slides_runtime_base_url: str = DEFAULT_RUNTIME_URL
    slides_theme: str = "white"
    math_renderer_url: str = DEFAULT_MATH_URL
    strict: bool = False

    def source_name(self, path: Path) -> str:
        """Path of ``path`` relative to the config directory, as used in diagnostics."""
        try:
            return path.resolve().relative_to(self.root.resolve()).as_posix()
        except ValueError:
            return path.as_posix()

    @property
    def theme_url(self) -> str:
        return f"{self.slides_runtime_base_url.rstrip('/')}/dist/theme/{self.slides_theme}.css"


def _as_list(value: Any) -> list[str]:
    if value is None:
        return []
    if isinstance(value, (str, int, float)):
        return [str(value)]
    return [str(v) for v in value]


def load_config(path: str | Path) -> tuple[Config | None, list[Diagnostic]]:
    """Read a YAML config; returns ``None`` when the file cannot yield a usable config."""
    path = Path(path)
    name = path.as_posix()
    span = SourceSpan(1, 1)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        return None, [error("config", f"config file {name} not found", span, name)]
    except (OSError, UnicodeDecodeError) as exc:
        return None, [error("config", f"cannot read config: {exc}", span, name)]
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", 0) + 1
        return None, [error("config", f"invalid YAML: {exc}", SourceSpan(line, line), name)]
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        return None, [error("config", "config must be a mapping", span, name)]

    diagnostics: list[Diagnostic] = []
    for key in raw:
        if key not in _TOP_KEYS:
            diagnostics.append(warning("config", f"unknown config key {key!r}", span, name))
    for key, allowed in _NESTED_KEYS.items():
        sub = raw.get(key)
        if sub is None:
            continue
        if not isinstance(sub, dict):
            diagnostics.append(error("config", f"{key!r} must be a mapping", span, name))
            continue
        for sub_key in sub:
            if sub_key not in allowed:
                diagnostics.append(warning("config", f"unknown config key '{key}.{sub_key}'", span, name))

    root = path.parent
    sources = [root / s for s in _as_list(raw.get("sources"))]
    if not sources:
        diagnostics.append(error("config", "config must list at least one source under 'sources'", span, name))

    targets: list[Target] = []
    for t in _as_list(raw.get("targets", [t.value for t in Target])):
        try:
            target = Target(t)
        except ValueError:
            diagnostics.append(
                error("unknown-target", f"unknown target {t!r}; expected one of {[x.value for x in Target]}", span, name)
            )
            continue
        if target not in targets:
            targets.append(target)

    out_dir = root / str(raw.get("out_dir", DEFAULT_OUT_DIR))
    resolved_out = out_dir.resolve()
    for src in sources:
        if resolved_out == src.resolve() or resolved_out in src.resolve().parents:
            diagnostics.append(error("config", f"out_dir {out_dir} contains source {src}", span, name))

    if any(d.is_error for d in diagnostics):
        return None, diagnostics

    kernel = raw.get("kernel") or {}
    slides = raw.get("slides") or {}
    config = Config(
        sources=sources,
        root=root,
        title=None if raw.get("title") is None else str(raw["title"]),
        authors=_as_list(raw.get("authors")),
        bibliography=[root / b for b in _as_list(raw.get("bibliography"))],
        targets=targets,
        out_dir=out_dir,
        kernel_name=str(kernel.get("name", "python3")),
        kernel_language=str(kernel.get("language", "python")),
        slides_runtime_base_url=str(slides.get("runtime_base_url", DEFAULT_RUNTIME_URL)),
        slides_theme=str(slides.get("theme", "white")),
        math_renderer_url=str(raw.get("math_renderer_url", DEFAULT_MATH_URL)),
        strict=bool(raw.get("strict", False)),
    )
    return config, diagnostics
