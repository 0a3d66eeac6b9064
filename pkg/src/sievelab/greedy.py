"""Greedy assignment of factors to capacity-bounded bins."""
from __future__ import annotations

from typing import Sequence

from .exact import Magnitude


def pick_bin(item: Magnitude, caps: Sequence[Magnitude], contents: Sequence[Magnitude],
             allowed: Sequence[int] | None = None) -> int | None:
    """Index of the bin that should absorb ``item``, or ``None``.

    A bin can take ``item`` when ``content * item <= cap``. Among those the
    one with the largest remaining ratio ``cap / content`` wins; ties go to
    the lowest index.
    """
    best = None
    best_slack = None
    for i in allowed if allowed is not None else range(len(caps)):
        slack = caps[i] / contents[i]
        if item <= slack and (best is None or slack > best_slack):
            best, best_slack = i, slack
    return best


def greedy_fill(items: Sequence[Magnitude], caps: Sequence[Magnitude],
                contents: Sequence[Magnitude] | None = None,
                allowed: Sequence[int] | None = None):
    """Place ``items`` in order; returns ``(contents, placement)`` or ``None``.

    ``placement[i]`` is the bin index that received ``items[i]``.
    """
    contents = list(contents) if contents is not None else [Magnitude.one()] * len(caps)
    placement = []
    for item in items:
        i = pick_bin(item, caps, contents, allowed)
        if i is None:
            return None
        contents[i] = contents[i] * item
        placement.append(i)
    return contents, placement
