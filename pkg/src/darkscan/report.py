"""Report serialization: SiteReport/ComparisonReport to JSON and Markdown.

JSON numbers are emitted as plain decimals with at most 6 fractional digits
and the writer is deterministic, so parse -> re-render is byte-identical.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

import jsonschema
import numpy as np

from .classifier.base import CategoryDistribution
from .detection import (AggregationMode, ComparisonReport, DetectionResult,
                        SiteReport, predict_category)
from .errors import DarkScanError, ParseFailure
from .ingest import TextSegment
from .taxonomy import Category, canonical_order, parse_label

_CATEGORY_NAMES = [c.display_name for c in canonical_order()]

_CATEGORY_MAP_SCHEMA = {
    "type": "object",
    "required": _CATEGORY_NAMES,
    "additionalProperties": False,
    "properties": {
        name: {"type": "number", "minimum": 0, "maximum": 1}
        for name in _CATEGORY_NAMES
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["site_id", "pages", "n_segments", "mode", "fractions",
                 "mean_probabilities", "flags"],
    "additionalProperties": False,
    "properties": {
        "site_id": {"type": "string"},
        "pages": {"type": "array", "items": {"type": "string"}},
        "n_segments": {"type": "integer", "minimum": 0},
        "mode": {"enum": [m.value for m in AggregationMode]},
        "fractions": _CATEGORY_MAP_SCHEMA,
        "mean_probabilities": _CATEGORY_MAP_SCHEMA,
        "flags": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["text", "dom_path", "page_url", "categories",
                             "probabilities"],
                "additionalProperties": False,
                "properties": {
                    "text": {"type": "string"},
                    "dom_path": {"type": "string"},
                    "page_url": {"type": "string"},
                    "categories": {
                        "type": "array",
                        "items": {"enum": _CATEGORY_NAMES},
                    },
                    "probabilities": _CATEGORY_MAP_SCHEMA,
                },
            },
        },
    },
}


# ------------------------------------------------------- deterministic JSON

def _fmt_number(value) -> str:
    if isinstance(value, bool):
        raise DarkScanError("booleans have no place in report JSON")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    text = f"{float(value):.6f}".rstrip("0").rstrip(".")
    return text if text else "0"


def _emit(value, indent: int) -> str:
    """Tiny JSON writer: dict order preserved, floats as plain decimals."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (bool, int, float, np.integer, np.floating)):
        return _fmt_number(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{inner}{json.dumps(str(k), ensure_ascii=False)}: '
                f'{_emit(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{inner}{_emit(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise DarkScanError(f"cannot serialize {type(value).__name__}")


def round_category_map(values: Mapping[Category, float]) -> dict[str, float]:
    """Round to 6 digits; when that drifts the sum of a true distribution
    off 1 by more than the 1e-6 budget, push the residual into the largest
    entry. Maps that never summed to 1 are left untouched."""
    rounded = {c: round(float(values[c]), 6) for c in canonical_order()}
    residual = 1.0 - sum(rounded.values())
    if 1e-6 < abs(residual) <= 5e-6:
        top = max(canonical_order(), key=lambda c: rounded[c])
        rounded[top] = round(rounded[top] + residual, 6)
    return {c.display_name: rounded[c] for c in canonical_order()}


def report_to_dict(report: SiteReport) -> dict:
    flags = []
    for result in report.flagged:
        flags.append({
            "text": result.segment.text,
            "dom_path": result.segment.dom_path,
            "page_url": result.segment.page_url,
            "categories": [c.display_name for c in canonical_order()
                           if c in result.flagged_categories],
            "probabilities": round_category_map(result.distribution.probs),
        })
    return {
        "site_id": report.site_id,
        "pages": list(report.page_urls),
        "n_segments": report.n_segments,
        "mode": report.aggregation_mode.value,
        "fractions": round_category_map(report.category_fractions),
        "mean_probabilities": round_category_map(report.mean_probabilities),
        "flags": flags,
    }


def validate_report_dict(doc: dict) -> None:
    try:
        jsonschema.validate(doc, REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseFailure(f"report does not match schema: {exc.message}") from exc


def parse_report(text: str) -> SiteReport:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ParseFailure(f"report is not valid JSON: {exc}") from exc
    validate_report_dict(doc)
    mode = AggregationMode(doc["mode"])
    fractions = {parse_label(k): float(v) for k, v in doc["fractions"].items()}
    means = {parse_label(k): float(v)
             for k, v in doc["mean_probabilities"].items()}
    flagged = []
    for i, entry in enumerate(doc["flags"]):
        dist = CategoryDistribution(
            {parse_label(k): float(v)
             for k, v in entry["probabilities"].items()})
        seg_key = f"{entry['page_url']}|{i}|{entry['text']}"
        segment = TextSegment(
            segment_id=hashlib.sha1(seg_key.encode("utf-8")).hexdigest()[:12],
            text=entry["text"],
            dom_path=entry["dom_path"],
            order_index=i,
            page_url=entry["page_url"],
        )
        flagged.append(DetectionResult(
            segment=segment,
            distribution=dist,
            predicted=predict_category(dist),
            flagged_categories=frozenset(
                parse_label(c) for c in entry["categories"]),
        ))
    return SiteReport(
        site_id=doc["site_id"],
        page_urls=tuple(doc["pages"]),
        n_segments=int(doc["n_segments"]),
        category_fractions=fractions,
        mean_probabilities=means,
        flagged=tuple(flagged),
        aggregation_mode=mode,
    )


def load_report(path: str | Path) -> SiteReport:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DarkScanError(f"cannot read report {path}: {exc}") from exc
    return parse_report(text)


# ----------------------------------------------------------------- rendering

def _markdown_report(report: SiteReport) -> str:
    lines = [f"# Dark pattern report: {report.site_id}", ""]
    lines.append(f"- pages scanned: {len(report.page_urls)}")
    lines.append(f"- text segments: {report.n_segments}")
    lines.append(f"- aggregation mode: {report.aggregation_mode.value}")
    lines.append("")
    lines.append("| Category | Fraction | Mean probability |")
    lines.append("| --- | ---: | ---: |")
    fractions = round_category_map(report.category_fractions)
    means = round_category_map(report.mean_probabilities)
    for name in _CATEGORY_NAMES:
        lines.append(
            f"| {name} | {_fmt_number(fractions[name])} "
            f"| {_fmt_number(means[name])} |")
    lines.append("")
    lines.append(f"## Flagged segments ({len(report.flagged)})")
    lines.append("")
    if not report.flagged:
        lines.append("No segments crossed a threshold.")
    for i, result in enumerate(report.flagged, start=1):
        cats = ", ".join(
            f"{c.display_name} (p={_fmt_number(result.distribution[c])})"
            for c in canonical_order() if c in result.flagged_categories)
        lines.append(f"{i}. \"{result.segment.text}\" — {cats}")
        lines.append(f"   - path: `{result.segment.dom_path}`")
        if result.segment.page_url:
            lines.append(f"   - page: {result.segment.page_url}")
    lines.append("")
    return "\n".join(lines)


def render_report(report: SiteReport, fmt: str = "json") -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return _emit(report_to_dict(report), 0) + "\n"
    if fmt in ("md", "markdown"):
        return _markdown_report(report)
    raise ValueError(f"unknown report format {fmt!r}")


def render_report_array(reports: Sequence[SiteReport]) -> str:
    """JSON array of reports, one element per site."""
    return _emit([report_to_dict(r) for r in reports], 0) + "\n"


def comparison_to_dict(cmp: ComparisonReport) -> dict:
    return {
        "mode": cmp.mode.value,
        "ranking": [
            {
                "site_id": r.site_id,
                "not_dark_pattern": round(
                    float(r.headline[Category.NOT_DARK_PATTERN]), 6),
            }
            for r in cmp.ranked
        ],
        "categories": [
            {
                "category": v.category.display_name,
                "values": {site: round(float(val), 6)
                           for site, val in v.values.items()},
                "winner": v.winner,
            }
            for v in cmp.verdicts
        ],
    }


def _markdown_comparison(cmp: ComparisonReport) -> str:
    site_ids = [r.site_id for r in cmp.ranked]
    lines = ["# Site comparison", ""]
    lines.append(f"- aggregation mode: {cmp.mode.value}")
    lines.append("- ranking by Not Dark Pattern share, cleanest first:")
    for i, r in enumerate(cmp.ranked, start=1):
        ndp = _fmt_number(r.headline[Category.NOT_DARK_PATTERN])
        lines.append(f"  {i}. {r.site_id} ({ndp})")
    lines.append("")
    header = "| Category | " + " | ".join(site_ids) + " | Better |"
    lines.append(header)
    lines.append("| --- | " + " | ".join("---:" for _ in site_ids) + " | --- |")
    for v in cmp.verdicts:
        cells = " | ".join(_fmt_number(v.values[s]) for s in site_ids)
        lines.append(f"| {v.category.display_name} | {cells} | {v.winner} |")
    lines.append("")
    lines.append("Lower is better for dark categories; "
                 "higher is better for Not Dark Pattern.")
    lines.append("")
    return "\n".join(lines)


def render_comparison(cmp: ComparisonReport, fmt: str = "json") -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return _emit(comparison_to_dict(cmp), 0) + "\n"
    if fmt in ("md", "markdown"):
        return _markdown_comparison(cmp)
    raise ValueError(f"unknown comparison format {fmt!r}")
