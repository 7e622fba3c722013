"""Per-target inclusion and visibility of tagged fragments."""

from __future__ import annotations

from dataclasses import replace
from enum import Enum

from .nodes import CodeCell, Document, Fragment, TagSet, Target


class Visibility(str, Enum):
    SHOWN = "shown"
    INPUT_HIDDEN = "input-hidden"
    OUTPUT_HIDDEN = "output-hidden"


def included(fragment: Fragment, target: Target) -> bool:
    return target.skip_tag not in fragment.tags


def filter_for_target(document: Document, target: Target | str) -> Document:
    """Drop every fragment tagged ``skip-<target>``; everything else is kept in order."""
    target = Target(target)
    kept = tuple(f for f in document.fragments if included(f, target))
    if len(kept) == len(document.fragments):
        return document
    return replace(document, fragments=kept)


def skipped_everywhere(fragment: Fragment) -> bool:
    return all(not included(fragment, t) for t in Target)


def visibility(cell: CodeCell, target: Target | str, inherited: TagSet = TagSet()) -> Visibility:
    """How ``cell`` is shown in ``target``; ``inherited`` carries the enclosing fragment's tags.

    Notebooks always show the cell: the tags travel as cell metadata instead.
    """
    target = Target(target)
    if target is Target.NOTEBOOK:
        return Visibility.SHOWN
    tags = cell.tags | inherited
    if "hide-input" in tags:
        return Visibility.INPUT_HIDDEN
    if "hide-output" in tags:
        return Visibility.OUTPUT_HIDDEN
    return Visibility.SHOWN
