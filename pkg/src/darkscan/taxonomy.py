"""Eight-category label space shared by every stage of the audit pipeline.

The canonical ordering (alphabetical by display name) is load-bearing: it is
the order of probability vectors, report tables, and the tie-break order for
argmax. Keep it frozen.
"""
from __future__ import annotations

import re
from enum import Enum

from .errors import UnknownLabel


class Category(Enum):
    """Statement category: seven dark-pattern types plus the benign class."""

    FORCED_ACTION = "Forced Action"
    MISDIRECTION = "Misdirection"
    NOT_DARK_PATTERN = "Not Dark Pattern"
    OBSTRUCTION = "Obstruction"
    SCARCITY = "Scarcity"
    SNEAKING = "Sneaking"
    SOCIAL_PROOF = "Social Proof"
    URGENCY = "Urgency"

    @property
    def display_name(self) -> str:
        return self.value

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


# Enum definition order is already the canonical (alphabetical) order.
_CANONICAL: tuple[Category, ...] = tuple(Category)

DARK_CATEGORIES: tuple[Category, ...] = tuple(
    c for c in _CANONICAL if c is not Category.NOT_DARK_PATTERN
)

DISPLAY_NAMES: tuple[str, ...] = tuple(c.display_name for c in _CANONICAL)

_BY_KEY = {c.display_name.lower(): c for c in _CANONICAL}


def canonical_order() -> tuple[Category, ...]:
    """The 8 categories in canonical order; stable across calls."""
    return _CANONICAL


def canonical_index(category: Category) -> int:
    return _CANONICAL.index(category)


def parse_label(raw: str) -> Category:
    """Parse a label string, tolerating case, underscores, hyphens and
    stray spaces.

    Raises UnknownLabel when the normalized string matches none of the eight
    display names.
    """
    key = re.sub(r"[\s_\-]+", " ", raw.strip()).lower()
    try:
        return _BY_KEY[key]
    except KeyError:
        raise UnknownLabel(raw) from None
