"""Flagging and aggregation.

Per-segment distributions become flags by per-category thresholds; flags
and predictions roll up into per-site reports and multi-site comparisons.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classifier.base import CategoryDistribution
from .errors import DarkScanError, EmptySite, ModeMismatch
from .ingest import TextSegment
from .taxonomy import Category, DARK_CATEGORIES, canonical_order, parse_label

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class ThresholdConfig:
    """Per-dark-category flag thresholds. NotDarkPattern has none: a benign
    prediction is never a flag."""

    thresholds: Mapping[Category, float] = field(default_factory=dict)
    notes: Mapping[Category, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for cat, value in self.thresholds.items():
            if cat is Category.NOT_DARK_PATTERN:
                raise ValueError("NotDarkPattern takes no threshold")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"threshold for {cat.display_name} not in [0,1]")

    def __getitem__(self, category: Category) -> float:
        return self.thresholds.get(category, DEFAULT_THRESHOLD)

    @classmethod
    def uniform(cls, value: float = DEFAULT_THRESHOLD) -> "ThresholdConfig":
        return cls({c: value for c in DARK_CATEGORIES})


def load_thresholds(path: str | Path) -> ThresholdConfig:
    """JSON map display-name -> number; missing categories keep the default."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DarkScanError(f"cannot read thresholds {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise DarkScanError("thresholds file must be a JSON object")
    return ThresholdConfig(
        {parse_label(k): float(v) for k, v in raw.items()})


def save_thresholds(config: ThresholdConfig, path: str | Path) -> None:
    doc = {c.display_name: config[c] for c in DARK_CATEGORIES}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def predict_category(dist: CategoryDistribution) -> Category:
    """Argmax with canonical-order tie-break (argmax returns the first hit)."""
    return canonical_order()[int(np.argmax(dist.as_vector()))]


def flag(dist: CategoryDistribution, config: ThresholdConfig) -> set[Category]:
    return {c for c in DARK_CATEGORIES if dist[c] >= config[c]}


@dataclass(frozen=True)
class DetectionResult:
    segment: TextSegment
    distribution: CategoryDistribution
    predicted: Category
    flagged_categories: frozenset[Category]

    @property
    def is_flagged(self) -> bool:
        return bool(self.flagged_categories)


def detect(segment: TextSegment, dist: CategoryDistribution,
           config: ThresholdConfig) -> DetectionResult:
    return DetectionResult(
        segment=segment,
        distribution=dist,
        predicted=predict_category(dist),
        flagged_categories=frozenset(flag(dist, config)),
    )


class AggregationMode(str, Enum):
    # values double as the wire/CLI names
    ARGMAX_FRACTION = "argmax"
    MEAN_PROBABILITY = "mean"


@dataclass(frozen=True)
class SiteReport:
    site_id: str
    page_urls: tuple[str, ...]
    n_segments: int
    category_fractions: Mapping[Category, float]
    mean_probabilities: Mapping[Category, float]
    flagged: tuple[DetectionResult, ...]
    aggregation_mode: AggregationMode

    @property
    def headline(self) -> Mapping[Category, float]:
        """The map the selected mode treats as the per-category verdict."""
        if self.aggregation_mode is AggregationMode.ARGMAX_FRACTION:
            return self.category_fractions
        return self.mean_probabilities


def aggregate(results: Sequence[DetectionResult],
              mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
              site_id: str = "site") -> SiteReport:
    if not results:
        raise EmptySite("no segments to aggregate")
    n = len(results)
    counts = {c: 0 for c in canonical_order()}
    sums = np.zeros(8, dtype=np.float64)
    for r in results:
        counts[r.predicted] += 1
        sums += r.distribution.as_vector()
    fractions = {c: counts[c] / n for c in canonical_order()}
    means = dict(zip(canonical_order(), (sums / n).tolist()))
    pages: list[str] = []
    for r in results:
        if r.segment.page_url and r.segment.page_url not in pages:
            pages.append(r.segment.page_url)
    flagged = tuple(r for r in results if r.is_flagged)
    return SiteReport(
        site_id=site_id,
        page_urls=tuple(pages),
        n_segments=n,
        category_fractions=fractions,
        mean_probabilities=means,
        flagged=flagged,
        aggregation_mode=mode,
    )


@dataclass(frozen=True)
class CategoryVerdict:
    category: Category
    values: Mapping[str, float]  # site_id -> headline value
    winner: str  # site_id or "tie"; lower wins for dark categories


@dataclass(frozen=True)
class ComparisonReport:
    ranked: tuple[SiteReport, ...]  # cleanest (highest NotDarkPattern) first
    verdicts: tuple[CategoryVerdict, ...]
    mode: AggregationMode


def compare_sites(reports: Sequence[SiteReport]) -> ComparisonReport:
    if len(reports) < 2:
        raise DarkScanError("need at least 2 reports to compare")
    modes = {r.aggregation_mode for r in reports}
    if len(modes) != 1:
        raise ModeMismatch(
            "cannot compare reports with different aggregation modes: "
            + ", ".join(sorted(m.value for m in modes)))
    mode = modes.pop()
    ranked = tuple(sorted(
        reports, key=lambda r: -r.headline[Category.NOT_DARK_PATTERN]))
    verdicts = []
    for cat in canonical_order():
        values = {r.site_id: r.headline[cat] for r in reports}
        if cat is Category.NOT_DARK_PATTERN:
            best = max(values.values())  # cleanliness: higher is better
        else:
            best = min(values.values())  # dark pattern share: lower is better
        leaders = [r.site_id for r in reports if values[r.site_id] == best]
        winner = leaders[0] if len(leaders) == 1 else "tie"
        verdicts.append(CategoryVerdict(category=cat, values=values,
                                        winner=winner))
    return ComparisonReport(ranked=ranked, verdicts=tuple(verdicts), mode=mode)
