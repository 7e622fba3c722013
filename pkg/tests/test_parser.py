import json

from hypothesis import given, settings, strategies as st

from onesource.nodes import (
    Admonition,
    CiteRole,
    CodeBlock,
    CodeCell,
    CodeSpan,
    Emph,
    Figure,
    Heading,
    MathBlock,
    MathInline,
    Paragraph,
    RefRole,
    SlideType,
    SourceSpan,
    Table,
    Text,
    document_blocks,
    walk_blocks,
    walk_inlines,
    block_inlines,
)
from onesource.parser import parse_source
from onesource.parser.blocks import parse_blocks
from onesource.parser.cells import split_cells
from onesource.parser.directives import parse_directive
from onesource.parser.frontmatter import parse_frontmatter
from onesource.parser.inlines import parse_inlines

from conftest import SAMPLE


def strip_spans(inlines):
    """Inline nodes as (type, payload) pairs, ignoring spans."""
    out = []
    for node in inlines:
        if isinstance(node, Text):
            out.append(("text", node.text))
        elif isinstance(node, Emph):
            out.append(("emph", strip_spans(node.children)))
        elif isinstance(node, RefRole):
            out.append(("ref", node.label))
        elif isinstance(node, CiteRole):
            out.append(("cite", list(node.keys)))
        elif isinstance(node, CodeSpan):
            out.append(("code", node.text))
        elif isinstance(node, MathInline):
            out.append(("math", node.latex))
        else:
            out.append((type(node).__name__, None))
    return out


# -- frontmatter --------------------------------------------------------------


def test_frontmatter_title():
    fm, rest, diags = parse_frontmatter("---\ntitle: T\n---\nbody")
    assert fm.title == "T" and rest == "body" and diags == []


def test_no_frontmatter_leaves_text_alone():
    fm, rest, diags = parse_frontmatter("body only")
    assert fm.title is None and rest == "body only" and diags == []


def test_malformed_frontmatter():
    fm, rest, diags = parse_frontmatter("---\n: bad\n---\nx")
    assert fm.title is None and fm.extra == {}
    assert [d.code for d in diags] == ["bad-frontmatter"]
    assert diags[0].span.start_line == 2
    assert rest == "x"


def test_frontmatter_authors_and_nested_opaque():
    text = "---\ntitle: T\nauthors: [A, B]\nextra:\n  nested: 1\n---\n"
    fm, _, diags = parse_frontmatter(text)
    assert fm.authors == ("A", "B")
    assert "nested" in fm.extra["extra"]
    assert diags == []


# -- cell splitting -----------------------------------------------------------


def test_single_fragment():
    frags, diags = split_cells("a")
    assert [f.text for f in frags] == ["a"] and frags[0].tags_json is None and diags == []


def test_break_with_tags():
    frags, _ = split_cells('a\n\n+++ {"tags": ["skip-slides"]}\n\nb')
    assert [f.text for f in frags] == ["a", "b"]
    assert json.loads(frags[1].tags_json) == {"tags": ["skip-slides"]}


def test_break_inside_fence_ignored():
    frags, _ = split_cells("```\n+++\n```\nc")
    assert len(frags) == 1


def test_unclosed_fence_is_an_error():
    _, diags = split_cells("```\nnever closed\n+++\n")
    assert [d.code for d in diags] == ["unclosed-fence"]


def reference_breaks(text):
    """Independent oracle: line numbers of +++ lines that split cells.

    Tracks only what matters for fences: an opening run of >=3 backticks or
    tildes (indent <= 3, backtick info strings may not contain backticks) and a
    closing run of the same character at least as long with nothing after it.
    """
    breaks = []
    fence_char, fence_len = None, 0
    for number, line in enumerate(text.split("\n"), start=1):
        indent = len(line) - len(line.lstrip(" "))
        body = line.lstrip(" ")
        if fence_char is None:
            if indent <= 3 and body[:3] in ("```", "~~~"):
                char = body[0]
                run = len(body) - len(body.lstrip(char))
                info = body[run:]
                if not (char == "`" and "`" in info):
                    fence_char, fence_len = char, run
                    continue
            if line.startswith("+++"):
                breaks.append(number)
        else:
            run = len(body) - len(body.lstrip(fence_char))
            if indent <= 3 and run >= fence_len and body[run:].strip() == "":
                fence_char = None
    return breaks


def doc_lines():
    return st.lists(
        st.sampled_from(
            ["+++", '+++ {"tags": ["skip-book"]}', "```", "```python", "````", "~~~", "  ```", "    ```",
             "``` a`b", "text", "", "more *text*", "+++x", " +++"]
        ),
        max_size=30,
    )


@given(doc_lines())
@settings(max_examples=300)
def test_fence_safety_against_oracle(lines):
    text = "\n".join(lines)
    frags, diags = split_cells(text)
    if any(d.code == "unclosed-fence" for d in diags):
        return
    used = {f.break_line for f in frags if f.break_line is not None}
    expected = set(reference_breaks(text))
    # every break we honoured is one the oracle honours, and no honoured break lies inside a fence
    assert used <= expected
    # non-empty segments between oracle breaks match the fragment count
    bounds = [0, *sorted(expected), len(lines) + 1]
    non_empty = sum(
        1 for lo, hi in zip(bounds, bounds[1:]) if any(l.strip() for l in lines[lo : hi - 1])
    )
    assert len(frags) == non_empty


@given(doc_lines())
@settings(max_examples=300)
def test_fragment_spans_disjoint_and_ascending(lines):
    frags, _ = split_cells("\n".join(lines))
    for a, b in zip(frags, frags[1:]):
        assert a.span.end_line < b.span.start_line


# -- blocks and inlines -------------------------------------------------------


def blocks_of(text):
    blocks, diags = parse_blocks(text)
    return blocks, diags


def test_atx_heading():
    (h,), _ = blocks_of("# Hello")
    assert isinstance(h, Heading) and h.level == 1 and strip_spans(h.children) == [("text", "Hello")]


def test_emphasis_paragraph():
    (p,), _ = blocks_of("*foo bar*")
    assert isinstance(p, Paragraph)
    assert strip_spans(p.children) == [("emph", [("text", "foo bar")])]


def test_label_attaches_to_heading():
    (h,), diags = blocks_of("(sec-x)=\n# X")
    assert h.label == "sec-x" and strip_spans(h.children) == [("text", "X")] and diags == []


def test_unattached_label_warns():
    _, diags = blocks_of("(sec-x)=\nplain paragraph")
    assert [d.code for d in diags] == ["unattached-label"]


def test_bad_label():
    (h,), diags = blocks_of("(sec.x)=\n# X")
    assert [d.code for d in diags] == ["bad-label"]
    assert h.label is None


def test_pipe_table():
    (t,), _ = blocks_of("| a | b |\n|---|:-:|\n| 1 | 2 |")
    assert isinstance(t, Table) and len(t.header) == 2 and len(t.rows) == 1


def test_display_math_with_label():
    (m,), _ = blocks_of("$$\nE=mc^2\n$$ (eq-1)")
    assert isinstance(m, MathBlock) and m.latex == "E=mc^2" and m.label == "eq-1"


def test_inline_ref():
    inl, _ = parse_inlines("see {ref}`fig-a`")
    assert strip_spans(inl) == [("text", "see "), ("ref", "fig-a")]


def test_inline_cite():
    inl, _ = parse_inlines("{cite}`flach1994simply`")
    assert strip_spans(inl) == [("cite", ["flach1994simply"])]


def test_lone_asterisks_are_text():
    inl, _ = parse_inlines("a * b")
    assert strip_spans(inl) == [("text", "a * b")]


def test_unknown_role_warns_and_keeps_content():
    inl, diags = parse_inlines("{banana}`x`")
    assert [d.code for d in diags] == ["unknown-role"]
    assert strip_spans(inl) == [("code", "x")]


def test_empty_role_warns():
    _, diags = parse_inlines("{cite}`` ``")
    assert [d.code for d in diags] == ["empty-role"]


def test_dollar_math_and_price():
    inl, _ = parse_inlines("costs $5 and $x^2$")
    assert ("math", "x^2") in strip_spans(inl)
    assert strip_spans(inl)[0] == ("text", "costs $5 and ")


# -- directives ---------------------------------------------------------------


def directive(name, argument="", options="", body=""):
    return parse_directive(
        name, argument, options, body, span=SourceSpan(1, 3), body_line=2, source="t.md", lines=None
    )


def test_math_directive():
    block, diags = directive("math", options=":label: eq1", body="E=mc^2")
    assert block == MathBlock("E=mc^2", block.span, "eq1") and diags == []


def test_code_cell_directive():
    block, diags = directive("code-cell", "python", ":tags: [hide-input]", "print(1)")
    assert isinstance(block, CodeCell)
    assert block.language == "python" and block.tags.as_list() == ["hide-input"] and diags == []


def test_figure_without_path():
    block, diags = directive("figure")
    assert block is None
    assert [d.code for d in diags] == ["missing-argument"]


def test_unknown_directive_falls_back_to_code():
    block, diags = directive("mermaid", body="graph TD")
    assert isinstance(block, CodeBlock)
    assert [d.code for d in diags] == ["unknown-directive"]


def test_admonition_parses_body():
    block, _ = directive("note", body="*hi*")
    assert isinstance(block, Admonition) and isinstance(block.children[0], Paragraph)


def test_directive_in_document():
    doc, diags = parse_source("```{figure} a.png\n:name: fig-a\n:alt: An A\n\nCaption *here*.\n```\n")
    (fig,) = document_blocks(doc)
    assert isinstance(fig, Figure)
    assert (fig.target, fig.alt, fig.label) == ("a.png", "An A", "fig-a")
    assert diags == []


# -- whole documents ----------------------------------------------------------


def test_empty_source():
    doc, diags = parse_source("")
    assert doc.fragments == () and doc.frontmatter.title is None and diags == []


def test_three_breaks_four_fragments():
    doc, _ = parse_source("one\n+++\ntwo\n+++\nthree\n+++\nfour")
    assert [b.children[0].text for f in doc.fragments for b in f.blocks] == ["one", "two", "three", "four"]


def test_cell_metadata_decoded():
    doc, diags = parse_source('a\n+++ {"tags": ["skip-book"], "slide": "subslide"}\nb')
    second = doc.fragments[1]
    assert second.tags.as_list() == ["skip-book"] and second.slide_type is SlideType.SUBSLIDE
    assert diags == []


def test_bad_cell_metadata():
    _, diags = parse_source("a\n+++ {not json}\nb")
    assert [d.code for d in diags] == ["bad-cell-metadata"]
    _, diags = parse_source('a\n+++ {"slide": "sideways"}\nb')
    assert [d.code for d in diags] == ["bad-slide-type"]


def test_crlf_normalised():
    a, _ = parse_source("# T\r\n\r\ntext\r\n")
    b, _ = parse_source("# T\n\ntext\n")
    assert a == b


def test_bundled_sample_counts():
    # hand count on the committed sample: 12 fragments, 2 labelled figures, 1 labelled equation
    doc, diags = parse_source((SAMPLE / "darts.md").read_text(), "darts.md")
    blocks = list(document_blocks(doc))
    assert len(doc.fragments) == 12
    assert sum(1 for b in blocks if isinstance(b, Figure) and b.label) == 2
    assert sum(1 for b in blocks if isinstance(b, MathBlock) and b.label) == 1
    assert sum(1 for b in blocks if isinstance(b, CodeCell)) >= 3
    assert diags == []


# -- properties ---------------------------------------------------------------

source_lines = st.lists(
    st.sampled_from(
        ["# Head", "## Sub", "para *em*", "", "+++", '+++ {"tags": ["skip-slides"]}', "```python", "```",
         "- item", "1. one", "> quote", "$$", "x^2", "$$ (eq-a)", "(lab)=", "```{note}", "| a |", "|---|",
         "---", "title: t", "    code", "{cite}`k`"]
    ),
    max_size=40,
)


@given(source_lines)
@settings(max_examples=300)
def test_parse_is_deterministic(lines):
    text = "\n".join(lines)
    assert parse_source(text, "f.md") == parse_source(text, "f.md")


@given(source_lines)
@settings(max_examples=300)
def test_spans_within_file(lines):
    text = "\n".join(lines)
    doc, diags = parse_source(text, "f.md")
    n = len(text.split("\n"))
    for fragment in doc.fragments:
        assert 1 <= fragment.span.start_line <= fragment.span.end_line <= n
        for block in walk_blocks(fragment.blocks):
            assert fragment.span.start_line <= block.span.start_line <= block.span.end_line <= fragment.span.end_line
            for node in walk_inlines(block_inlines(block)):
                assert 1 <= node.span.start_line <= node.span.end_line <= n
    for d in diags:
        assert 1 <= d.span.start_line <= max(n, 1)


@given(source_lines)
@settings(max_examples=300)
def test_spans_cover_every_non_blank_line_once(lines):
    text = "\n".join(lines)
    frags, diags = split_cells(text)
    if diags:
        return
    covered = [0] * (len(lines) + 1)
    for f in frags:
        for k in range(f.span.start_line, f.span.end_line + 1):
            covered[k] += 1
        if f.break_line is not None:
            covered[f.break_line] += 1
    breaks_without_body = set(reference_breaks(text)) - {f.break_line for f in frags}
    for k in breaks_without_body:
        covered[k] += 1
    for number, line in enumerate(lines, start=1):
        if line.strip():
            assert covered[number] == 1, (number, line)
        else:
            assert covered[number] <= 1
