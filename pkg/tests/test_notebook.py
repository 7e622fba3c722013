import json
import re

from hypothesis import given, settings, strategies as st
import jsonschema
import pytest

from onesource.filtering import filter_for_target
from onesource.htmlrender import render_blocks
from onesource.nodes import CodeCell, Target
from onesource.notebook import MarkdownWriter, Notebook, serialize_notebook, to_notebook
from onesource.parser import parse_source
from onesource.xref import collect_labels, resolve_references

import fuzzdocs


def notebook_of(text, name="n.md"):
    doc, _ = parse_source(text, name)
    table, _ = collect_labels([doc])
    doc = filter_for_target(doc, Target.NOTEBOOK)
    doc, _ = resolve_references(doc, table, href=None)
    return doc, to_notebook(doc, labels=table)


def read_code_sources(data: bytes) -> list[str]:
    """Minimal ipynb reader: code-cell sources in order."""
    nb = json.loads(data)
    return ["".join(c["source"]) for c in nb["cells"] if c["cell_type"] == "code"]


def test_paragraph_is_one_markdown_cell():
    _, nb = notebook_of("Just text.")
    assert [(c.cell_type, c.source) for c in nb.cells] == [("markdown", "Just text.")]


def test_paragraph_then_code():
    _, nb = notebook_of("Intro.\n\n```{code-cell} python\nprint(1)\n```")
    assert [c.cell_type for c in nb.cells] == ["markdown", "code"]
    assert nb.cells[1].source == "print(1)"


def test_hide_input_tag_in_metadata():
    _, nb = notebook_of("```{code-cell} python\n:tags: [hide-input]\nx\n```")
    assert nb.cells[0].metadata == {"tags": ["hide-input"]}


def test_fragment_tags_merge_and_slide_type():
    text = '+++ {"tags": ["x-a"], "slide": "slide"}\n\nProse.\n\n```{code-cell} python\n:tags: [hide-output]\nx\n```'
    _, nb = notebook_of(text)
    md, code = nb.cells
    assert md.metadata == {"tags": ["x-a"], "slideshow": {"slide_type": "slide"}}
    assert code.metadata == {"tags": ["hide-output", "x-a"], "slideshow": {"slide_type": "-"}}


def test_references_and_citations_become_text():
    _, nb = notebook_of("```{figure} a.png\n:name: f\n\nCap.\n```\n\nSee {ref}`f`.")
    assert "See Figure 1." in nb.cells[0].source
    assert "assets/a.png" in nb.cells[0].source


def test_empty_notebook_validates(nb_schema):
    data = json.loads(serialize_notebook(Notebook()))
    assert data["cells"] == [] and data["nbformat"] == 4 and data["nbformat_minor"] == 5
    jsonschema.validate(data, nb_schema)


def test_serialisation_is_canonical():
    _, nb = notebook_of("a\n+++\nb")
    first, second = serialize_notebook(nb), serialize_notebook(nb)
    assert first == second
    assert first.endswith(b"}\n") and b"\r" not in first
    assert first.startswith(b'{\n "cells": [\n  {')


def test_two_cells_distinct_ids():
    _, nb = notebook_of("same\n+++\nsame")
    ids = [c.id for c in nb.cells]
    assert len(set(ids)) == 2
    assert all(re.fullmatch(r"[0-9a-f]{8}", i) for i in ids)


@pytest.mark.parametrize(
    "source",
    [
        "a \\*b\\* c_d `x` [l](u) $m$",
        "**strong _emph_** and ``tick ` inside``",
        "literal \\[brackets\\] and \\$5 and <angle>",
        "snake_case_name and _real emphasis_",
        "- one\n- two\n\n  continued",
        "> quoted *text*",
    ],
)
def test_markdown_writer_round_trips(source):
    doc, _ = parse_source(source, "m.md")
    text = MarkdownWriter().blocks(doc.fragments[0].blocks)
    again, _ = parse_source(text, "m.md")
    assert render_blocks(again.fragments[0].blocks) == render_blocks(doc.fragments[0].blocks)


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=150, deadline=None)
def test_fuzz_notebooks_valid_and_round_trip(nb_schema, seed):
    doc, nb = notebook_of(fuzzdocs.generate(seed).text, "fuzz.md")
    data = serialize_notebook(nb)
    parsed = json.loads(data)
    jsonschema.validate(parsed, nb_schema)
    expected = [b.source for f in doc.fragments for b in f.blocks if isinstance(b, CodeCell)]
    assert read_code_sources(data) == expected
    prose_fragments = sum(1 for f in doc.fragments if any(not isinstance(b, CodeCell) for b in f.blocks))
    assert len(nb.cells) == prose_fragments + len(expected)
    for c in parsed["cells"]:
        assert all(line.endswith("\n") for line in c["source"][:-1])
        if c["cell_type"] == "markdown":
            assert "outputs" not in c
        else:
            assert c["outputs"] == [] and c["execution_count"] is None
