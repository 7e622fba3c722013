"""``publish`` command line: build, check and init."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
import shutil
import sys

import click

from .build import EXIT_ERRORS, EXIT_OK, EXIT_USAGE, BuildReport, cmd_build, cmd_check
from .config import DEFAULT_CONFIG, load_config
from .diagnostics import Diagnostic
from .nodes import Target
from . import __version__

SAMPLE_FILES = ("publish.yml", "darts.md", "references.bib")


def _report(diagnostics: list[Diagnostic]) -> None:
    for d in diagnostics:
        click.echo(d.format(), err=True)


def _load(config_path: str):
    config, diags = load_config(config_path)
    _report(diags)
    if config is None:
        sys.exit(EXIT_USAGE)
    return config


def _finish(report: BuildReport, verb: str) -> None:
    _report(report.diagnostics)
    n_err = len(report.errors)
    n_warn = sum(1 for d in report.diagnostics if d.severity.value == "warning")
    if report.exit_status == EXIT_OK:
        click.echo(f"{verb}: ok ({n_warn} warning(s))", err=True)
    else:
        click.echo(f"{verb}: failed with {n_err} error(s)", err=True)
    sys.exit(report.exit_status)


config_option = click.option(
    "--config",
    "config_path",
    default=DEFAULT_CONFIG,
    show_default=True,
    type=click.Path(dir_okay=False),
    help="Project configuration file.",
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__)
def main() -> None:
    """Publish one markdown source as a book, notebooks and a slide deck."""


@main.command()
@config_option
@click.option(
    "--target",
    "targets",
    multiple=True,
    type=click.Choice([t.value for t in Target]),
    help="Restrict the build to a target (repeatable).",
)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Override out_dir.")
@click.option("--strict", is_flag=True, default=None, help="Treat warnings as errors.")
def build(config_path: str, targets: tuple[str, ...], out_dir: str | None, strict: bool | None) -> None:
    """Build the configured targets into the output directory."""
    config = _load(config_path)
    report = cmd_build(config, targets or None, Path(out_dir) if out_dir else None, strict)
    for target, paths in report.outputs.items():
        click.echo(f"{target.value}: wrote {len(paths)} file(s)", err=True)
    _finish(report, "build")


@main.command()
@config_option
@click.option("--strict", is_flag=True, default=None, help="Treat warnings as errors.")
def check(config_path: str, strict: bool | None) -> None:
    """Run the whole pipeline without writing anything."""
    config = _load(config_path)
    _finish(cmd_check(config, strict), "check")


@main.command()
@click.argument("directory", type=click.Path(file_okay=False), default=".")
def init(directory: str) -> None:
    """Copy the bundled sample project into DIRECTORY."""
    dest = Path(directory)
    sample = resources.files("onesource") / "sample"
    existing = [name for name in SAMPLE_FILES if (dest / name).exists()]
    if existing:
        click.echo(f"refusing to overwrite {', '.join(existing)} in {dest}", err=True)
        sys.exit(EXIT_ERRORS)
    dest.mkdir(parents=True, exist_ok=True)
    with resources.as_file(sample) as src:
        shutil.copytree(src, dest, dirs_exist_ok=True)
    click.echo(f"sample project written to {dest}", err=True)


if __name__ == "__main__":
    main()
