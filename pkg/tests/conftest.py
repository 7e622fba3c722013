from __future__ import annotations

from html.parser import HTMLParser
import json
import re
from pathlib import Path
import shutil

from markdown_it import MarkdownIt
import pytest

from onesource.book import VOID_ELEMENTS

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
SAMPLE = TESTS.parent / "src" / "onesource" / "sample"
SCHEMA_PATH = TESTS / "data" / "nbformat.v4.5.schema.json"


@pytest.fixture
def sample_project(tmp_path: Path) -> Path:
    """Fresh copy of the bundled sample; returns the path to its publish.yml."""
    dest = tmp_path / "sample"
    shutil.copytree(SAMPLE, dest)
    return dest / "publish.yml"


@pytest.fixture(scope="session")
def nb_schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text())


def write_project(root: Path, body: str, *, bib: str | None = None, extra: str = "") -> Path:
    root.mkdir(parents=True, exist_ok=True)
    (root / "main.md").write_text(body)
    config = "sources: [main.md]\n"
    if bib is not None:
        (root / "refs.bib").write_text(bib)
        config += "bibliography: [refs.bib]\n"
    (root / "publish.yml").write_text(config + extra)
    return root / "publish.yml"


class TagBalance(HTMLParser):
    """Strict open/close matching; any mismatch is recorded."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.stack: list[str] = []
        self.problems: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag not in VOID_ELEMENTS:
            self.stack.append(tag)

    def handle_startendtag(self, tag, attrs):
        if tag not in VOID_ELEMENTS:
            self.problems.append(f"self-closing non-void <{tag}/>")

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            self.problems.append(f"end tag for void </{tag}>")
        elif not self.stack or self.stack[-1] != tag:
            self.problems.append(f"unexpected </{tag}> with open {self.stack[-3:]}")
        else:
            self.stack.pop()


def tag_problems(html: str) -> list[str]:
    checker = TagBalance()
    checker.feed(html)
    checker.close()
    return checker.problems + [f"unclosed <{t}>" for t in checker.stack]


class SectionTree(HTMLParser):
    """Nesting tree of <section> elements inside the reveal slides container."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.roots: list[dict] = []
        self._stack: list[dict] = []
        self._capture: dict | None = None

    def handle_starttag(self, tag, attrs):
        if tag == "section":
            node = {"children": [], "headings": [], "notes": 0, "fragments": 0, "text": []}
            (self._stack[-1]["children"] if self._stack else self.roots).append(node)
            self._stack.append(node)
        elif self._stack:
            cls = dict(attrs).get("class") or ""
            if tag == "aside" and "notes" in cls.split():
                self._stack[-1]["notes"] += 1
            if "fragment" in cls.split():
                self._stack[-1]["fragments"] += 1
            if tag in ("h1", "h2"):
                self._capture = self._stack[-1]
                self._stack[-1]["headings"].append("")

    def handle_endtag(self, tag):
        if tag == "section":
            self._stack.pop()
        elif tag in ("h1", "h2"):
            self._capture = None

    def handle_data(self, data):
        if self._capture is not None:
            self._capture["headings"][-1] += data
        if self._stack:
            self._stack[-1]["text"].append(data)


def section_tree(html: str) -> list[dict]:
    parser = SectionTree()
    parser.feed(html)
    return parser.roots


CM_CASES_PATH = TESTS / "data" / "commonmark_cases.txt"


def commonmark_cases() -> list[str]:
    """Curated inputs limited to supported constructs, separated by ``=====`` lines."""
    return CM_CASES_PATH.read_text()[:-1].split("\n=====\n")


def normalise_html(html: str) -> str:
    html = re.sub(r">\s+<", "><", html.strip())
    return re.sub(r"\s+", " ", html)


def reference_html(markdown: str) -> str:
    return MarkdownIt("commonmark").render(markdown)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
