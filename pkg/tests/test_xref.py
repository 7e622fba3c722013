from hypothesis import given, settings, strategies as st

from onesource.nodes import Heading, Link, Text, document_blocks, document_inlines, plain_text
from onesource.parser import parse_source
from onesource.xref import LabelKind, collect_labels, resolve_references

from conftest import FIXTURES


def build(text, name="d.md"):
    doc, diags = parse_source(text, name)
    assert not diags, diags
    table, diags = collect_labels([doc])
    return doc, table, diags


def test_two_figures_numbered_in_order():
    _, table, _ = build("```{figure} a.png\n:name: fa\n```\n\n```{figure} b.png\n:name: fb\n```")
    assert [table["fa"].number, table["fb"].number] == ["1", "2"]
    assert table["fa"].kind is LabelKind.FIGURE


def test_duplicate_label_across_kinds():
    _, table, diags = build("(x)=\n# Head\n\n```{figure} a.png\n:name: x\n```")
    assert [d.code for d in diags] == ["duplicate-label"]
    assert table["x"].kind is LabelKind.SECTION


def test_fixture_section_numbers():
    # hand enumeration of numbering.md: Alpha, Alpha one, Alpha two, Beta, Beta one, Beta two
    doc, table, _ = build((FIXTURES / "numbering.md").read_text())
    headings = [b for b in document_blocks(doc) if isinstance(b, Heading)]
    assert [table.number_for(doc.source_name, h) for h in headings] == ["1", "1.1", "1.2", "2", "2.1", "2.2"]


def test_fixture_figures_and_equations():
    _, table, _ = build((FIXTURES / "numbering.md").read_text())
    assert table["fig-a"].number == "1"
    # the unlabelled display math before eq-cd is not counted
    assert table["eq-cd"].number == "1"
    assert sorted(n for (_, kind, _), n in table.numbers.items() if kind is LabelKind.FIGURE) == ["1", "2"]


def test_numbering_spans_documents():
    a, _ = parse_source("# One\n\n```{figure} a.png\n```", "a.md")
    b, _ = parse_source("# Two\n\n```{figure} b.png\n:name: fb\n```", "b.md")
    table, _ = collect_labels([a, b])
    assert table["fb"].number == "2"


def resolved(text, **kwargs):
    doc, table, _ = build(text)
    return resolve_references(doc, table, **kwargs)


def link_texts(doc):
    return [(n.url, plain_text(n.children)) for n in document_inlines(doc) if isinstance(n, Link)]


def test_ref_to_figure():
    doc, diags = resolved("```{figure} a.png\n:name: fig-a\n```\n\nSee {ref}`fig-a`.")
    assert link_texts(doc) == [("#fig-a", "Figure 1")] and diags == []


def test_eq_role():
    doc, diags = resolved("$$\nx\n$$ (eq1)\n\nBy {eq}`eq1`.")
    assert link_texts(doc) == [("#eq1", "(1)")] and diags == []


def test_dangling_reference():
    doc, diags = resolved("See {ref}`nope`.")
    assert [d.code for d in diags] == ["dangling-reference"]
    assert diags[0].span.start_line == 1
    assert "??" in plain_text(n for n in document_inlines(doc) if isinstance(n, Text))


def test_ref_to_section_uses_title():
    doc, _ = resolved("(s)=\n# The *Title*\n\n{ref}`s`")
    assert link_texts(doc) == [("#s", "The Title")]


def test_eq_role_on_figure_warns():
    doc, diags = resolved("```{figure} a.png\n:name: f\n```\n\n{eq}`f`")
    assert [d.code for d in diags] == ["wrong-reference-kind"]
    assert link_texts(doc) == [("#f", "Figure 1")]


def test_plain_text_mode_and_unavailable_labels():
    text = "```{figure} a.png\n:name: f\n```\n\n{ref}`f`"
    doc, _ = resolved(text, href=None)
    assert link_texts(doc) == []
    doc, _ = resolved(text, available=set())
    assert link_texts(doc) == []


blocks = st.lists(
    st.sampled_from(
        [
            "# H1",
            "## H2",
            "### H3",
            "```{figure} p.png\n```",
            "$$\nx\n$$",
            "$$\ny\n$$ (eq-{n})",
            "(sec-{n})=\n# Labelled",
            "```{figure} q.png\n:name: fig-{n}\n```",
            "Some prose.",
        ]
    ),
    max_size=15,
)


def with_labels(parts):
    return [p.replace("{n}", str(k)) for k, p in enumerate(parts)]


def number_sequence(text):
    doc, _ = parse_source(text, "p.md")
    table, _ = collect_labels([doc])
    by_kind = {}
    for (_, kind, line), number in sorted(table.numbers.items(), key=lambda kv: kv[0][2]):
        by_kind.setdefault(kind, []).append(number)
    labels = {label: e.number for label, e in table.entries.items()}
    return by_kind, labels


@given(blocks, st.data())
@settings(max_examples=300)
def test_numbers_stable_under_prose_insertion(parts, data):
    position = data.draw(st.integers(min_value=0, max_value=len(parts)))
    prose = data.draw(st.sampled_from(["Inserted prose.", "More *words* here.", "- a list\n- of items"]))
    parts = with_labels(parts)
    before = number_sequence("\n\n".join(parts))
    after = number_sequence("\n\n".join(parts[:position] + [prose] + parts[position:]))
    assert before == after
