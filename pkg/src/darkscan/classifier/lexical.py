"""Keyword-lexicon classifier.

Fully deterministic baseline: per-category phrase lists are scored by
substring/word-boundary matching and converted to probabilities with a
temperature softmax. It exists so the whole pipeline can run and be tested
without any trained model.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..errors import DarkScanError
from ..taxonomy import Category, DARK_CATEGORIES, canonical_order, parse_label
from .base import CategoryDistribution, ClassifierBackend, softmax


DEFAULT_LEXICON_BIAS = 1.0
DEFAULT_LEXICON_TEMPERATURE = 0.5


def _compile(pattern: str) -> re.Pattern:
    """`*` is a lazy wildcard; bare single words get word boundaries."""
    escaped = re.escape(pattern.lower()).replace(r"\*", ".*?")
    if " " not in pattern and "*" not in pattern:
        escaped = rf"\b{escaped}\b"
    return re.compile(escaped, re.IGNORECASE)


@dataclass(frozen=True)
class Lexicon:
    """Per-category weighted phrase patterns plus softmax shaping constants.

    bias is the fixed score handed to NotDarkPattern so that pattern-free
    text lands on the benign class.
    """

    patterns: Mapping[Category, tuple[tuple[str, float], ...]]
    bias: float = DEFAULT_LEXICON_BIAS
    temperature: float = DEFAULT_LEXICON_TEMPERATURE
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        for cat in DARK_CATEGORIES:
            if not self.patterns.get(cat):
                raise ValueError(f"lexicon has no patterns for {cat.display_name}")
        for cat, entries in self.patterns.items():
            for pattern, weight in entries:
                if weight <= 0:
                    raise ValueError(f"non-positive weight for {pattern!r}")
                self._compiled.setdefault(cat, []).append((_compile(pattern), weight))

    def score(self, text: str) -> list[float]:
        """Raw category scores in canonical order."""
        lowered = text.lower()
        scores = []
        for cat in canonical_order():
            if cat is Category.NOT_DARK_PATTERN:
                scores.append(self.bias)
                continue
            total = 0.0
            for regex, weight in self._compiled.get(cat, ()):
                if regex.search(lowered):
                    total += weight
            scores.append(total)
        return scores


def lexical_classify(text: str, lexicon: Lexicon) -> CategoryDistribution:
    return softmax(lexicon.score(text), temperature=lexicon.temperature)


class LexicalBackend(ClassifierBackend):
    name = "lexical"

    def __init__(self, lexicon: Lexicon | None = None):
        self.lexicon = lexicon or default_lexicon()

    def classify_batch(self, texts: Sequence[str]) -> list[CategoryDistribution]:
        return [lexical_classify(t, self.lexicon) for t in texts]


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon JSON file: display-name -> [{pattern, weight}], plus
    optional top-level "bias" and "temperature" numbers."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DarkScanError(f"cannot read lexicon {path}: {exc}") from exc
    bias = float(raw.pop("bias", DEFAULT_LEXICON_BIAS))
    temperature = float(raw.pop("temperature", DEFAULT_LEXICON_TEMPERATURE))
    patterns: dict[Category, tuple[tuple[str, float], ...]] = {}
    for label, entries in raw.items():
        cat = parse_label(label)
        patterns[cat] = tuple((e["pattern"], float(e["weight"])) for e in entries)
    return Lexicon(patterns=patterns, bias=bias, temperature=temperature)


def save_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    doc: dict = {
        cat.display_name: [{"pattern": p, "weight": w} for p, w in entries]
        for cat, entries in lexicon.patterns.items()
    }
    doc["bias"] = lexicon.bias
    doc["temperature"] = lexicon.temperature
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


_DEFAULT_PATTERNS: dict[Category, tuple[tuple[str, float], ...]] = {
    Category.FORCED_ACTION: (
        ("sign up to continue", 3.0),
        ("sign up first", 2.5),
        ("you'll have to sign up", 3.0),
        ("create an account to", 2.5),
        ("must register", 2.5),
        ("registration required", 2.5),
        ("log in to continue", 2.5),
        ("requires an account", 2.5),
        ("you must agree", 2.5),
        ("accept to proceed", 2.5),
        ("install the app to", 2.5),
        ("members only", 2.0),
    ),
    Category.MISDIRECTION: (
        ("or regret", 3.0),
        ("or you'll miss", 3.0),
        ("you'll miss it", 3.0),
        ("miss this chance", 2.5),
        ("don't miss out", 2.5),
        ("no thanks, i don't want", 3.0),
        ("i don't want to save", 3.0),
        ("i prefer paying full price", 3.0),
        ("keep missing out", 2.5),
        ("lose my benefits", 2.5),
    ),
    Category.OBSTRUCTION: (
        ("call to cancel", 3.0),
        ("call us to cancel", 3.0),
        ("cannot be cancelled online", 3.0),
        ("contact customer service to", 2.5),
        ("visit a store to", 2.5),
        ("mail a written request", 3.0),
        ("cancellation requires", 2.5),
        ("take up to * business days to process", 2.0),
        ("unsubscribe by phone", 3.0),
    ),
    Category.SCARCITY: (
        ("only * left", 3.0),
        ("left in stock", 3.0),
        ("almost sold out", 3.0),
        ("almost gone", 2.5),
        ("limited stock", 2.5),
        ("low in stock", 2.5),
        ("selling fast", 2.5),
        ("while supplies last", 2.5),
        ("few remaining", 2.5),
        ("running out", 2.0),
        ("in high demand", 2.0),
    ),
    Category.SNEAKING: (
        ("automatically renews", 3.0),
        ("auto-renew", 3.0),
        ("renews automatically", 3.0),
        ("will be billed", 2.5),
        ("charged after the trial", 3.0),
        ("free trial converts", 3.0),
        ("handling fee", 2.5),
        ("processing fee", 2.5),
        ("convenience fee", 2.5),
        ("added at checkout", 2.5),
        ("fees apply at checkout", 2.5),
        ("protection plan added", 2.5),
        ("added to your order", 2.0),
        ("cancel anytime", 2.0),
    ),
    Category.SOCIAL_PROOF: (
        ("people are viewing", 3.0),
        ("people bought", 3.0),
        ("people have bought", 3.0),
        ("bought this today", 2.5),
        ("others are looking", 2.5),
        ("recently purchased", 2.5),
        ("people added this", 2.5),
        ("customers also bought", 2.0),
        ("best seller", 2.0),
        ("trending now", 2.0),
        ("most popular choice", 2.0),
    ),
    Category.URGENCY: (
        ("hurry", 2.5),
        ("limited time", 2.5),
        ("act now", 2.5),
        ("act fast", 2.5),
        ("ends today", 3.0),
        ("ends tonight", 3.0),
        ("offer expires", 3.0),
        ("expires in", 2.5),
        ("sale ends", 2.5),
        ("last chance", 2.5),
        ("today only", 3.0),
        ("time is running out", 3.0),
        ("before it's too late", 2.5),
        ("flash sale", 2.0),
    ),
}


def default_lexicon() -> Lexicon:
    """The built-in lexicon: a pragmatic phrase inventory per dark category."""
    return Lexicon(patterns=_DEFAULT_PATTERNS)
