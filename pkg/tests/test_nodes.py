import pytest
from hypothesis import given, strategies as st

from onesource.nodes import (
    RESERVED_TAGS,
    CiteRole,
    Emph,
    Heading,
    SourceSpan,
    TagSet,
    Target,
    Text,
    map_inlines,
    plain_text,
)
from onesource.tags import validate_tagset

SPAN = SourceSpan(1, 1)


def test_span_rejects_inverted_lines():
    with pytest.raises(ValueError):
        SourceSpan(3, 2)
    with pytest.raises(ValueError):
        SourceSpan(0, 1)


def test_cite_role_needs_a_key():
    with pytest.raises(ValueError):
        CiteRole((), SPAN)


def test_nodes_are_immutable():
    node = Text("a", SPAN)
    with pytest.raises(AttributeError):
        node.text = "b"


def test_target_skip_tags():
    assert [t.skip_tag for t in Target] == ["skip-book", "skip-notebook", "skip-slides"]


def test_plain_text_flattens_nesting():
    inlines = (Text("a ", SPAN), Emph((Text("b", SPAN),), SPAN))
    assert plain_text(inlines) == "a b"


def test_map_inlines_can_splice():
    inlines = (Text("x", SPAN), Emph((Text("y", SPAN),), SPAN))
    out = map_inlines(inlines, lambda n: (n, n) if isinstance(n, Text) and n.text == "y" else n)
    assert plain_text(out) == "xyy"


def test_heading_level_bounds():
    Heading(6, (), SPAN)
    with pytest.raises(ValueError):
        Heading(7, (), SPAN)


# -- validate_tagset ----------------------------------------------------------


def test_reserved_tag_kept():
    tags, diags = validate_tagset(["skip-slides"])
    assert tags == TagSet(frozenset({"skip-slides"}))
    assert diags == []


def test_empty_tagset():
    tags, diags = validate_tagset([])
    assert len(tags) == 0 and diags == []


def test_duplicate_and_unknown_each_warn_once():
    tags, diags = validate_tagset(["skip-slides", "skip-slides", "banana"])
    assert tags.as_list() == ["skip-slides"]
    assert sorted(d.code for d in diags) == ["duplicate-tag", "unknown-tag"]
    assert all(d.severity.value == "warning" for d in diags)


def test_user_tags_need_a_suffix():
    tags, diags = validate_tagset(["x-draft", "x-"])
    assert tags.as_list() == ["x-draft"]
    assert [d.code for d in diags] == ["unknown-tag"]


tag_strings = st.one_of(
    st.sampled_from(sorted(RESERVED_TAGS)),
    st.from_regex(r"x-[a-z0-9]{1,6}", fullmatch=True),
    st.text(min_size=0, max_size=8),
)


@given(st.lists(tag_strings, max_size=12))
def test_validate_is_idempotent(raw):
    tags, _ = validate_tagset(raw)
    again, diags = validate_tagset(tags.as_list())
    assert again == tags
    assert diags == []


@given(st.lists(tag_strings, max_size=12))
def test_one_warning_per_duplicate_or_unknown(raw):
    _, diags = validate_tagset(raw)
    duplicates = len(raw) - len(set(raw))
    unknown = sum(1 for t in set(raw) if t not in RESERVED_TAGS and not (t.startswith("x-") and len(t) > 2))
    assert len(diags) == duplicates + unknown
