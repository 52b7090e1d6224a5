"""End-to-end scan orchestration: page source -> segments -> distributions
-> flags -> SiteReport. Shared by the CLI and the HTTP service."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence
from urllib.parse import urlparse

from .classifier.base import ClassifierBackend
from .detection import (AggregationMode, DetectionResult, SiteReport,
                        ThresholdConfig, aggregate, detect)
from .ingest import (FetchConfig, PageSource, SegmentationRules,
                     extract_segments, fetch_page, iter_corpus,
                     load_page_file)


def scan_page(page: PageSource, backend: ClassifierBackend,
              thresholds: ThresholdConfig,
              rules: SegmentationRules | None = None) -> list[DetectionResult]:
    segments = extract_segments(page, rules)
    if not segments:
        return []
    distributions = backend.classify_batch([s.text for s in segments])
    return [detect(seg, dist, thresholds)
            for seg, dist in zip(segments, distributions)]


def scan_pages(pages: Sequence[PageSource], backend: ClassifierBackend,
               thresholds: ThresholdConfig | None = None,
               mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
               site_id: str = "site",
               rules: SegmentationRules | None = None,
               jobs: int = 1) -> SiteReport:
    thresholds = thresholds or ThresholdConfig.uniform()
    if jobs > 1 and len(pages) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_page = list(pool.map(
                lambda p: scan_page(p, backend, thresholds, rules), pages))
    else:
        per_page = [scan_page(p, backend, thresholds, rules) for p in pages]
    results = [r for batch in per_page for r in batch]
    return aggregate(results, mode=mode, site_id=site_id)


def scan_html(html: str, backend: ClassifierBackend,
              thresholds: ThresholdConfig | None = None,
              mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
              site_id: str = "inline", url: str = "") -> SiteReport:
    page = PageSource(url=url, html=html)
    return scan_pages([page], backend, thresholds, mode, site_id)


def site_id_for_url(url: str) -> str:
    host = urlparse(url).hostname
    return host or "site"


def scan_url(url: str, backend: ClassifierBackend,
             thresholds: ThresholdConfig | None = None,
             mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
             fetch_config: FetchConfig | None = None) -> SiteReport:
    page = fetch_page(url, fetch_config or FetchConfig())
    return scan_pages([page], backend, thresholds, mode, site_id_for_url(url))


def scan_file(path: str | Path, backend: ClassifierBackend,
              thresholds: ThresholdConfig | None = None,
              mode: AggregationMode = AggregationMode.ARGMAX_FRACTION) -> SiteReport:
    page = load_page_file(path)
    return scan_pages([page], backend, thresholds, mode, Path(path).stem)


def scan_corpus(corpus_dir: str | Path, backend: ClassifierBackend,
                thresholds: ThresholdConfig | None = None,
                mode: AggregationMode = AggregationMode.ARGMAX_FRACTION,
                jobs: int | None = None) -> list[SiteReport]:
    """One report per site directory (loose .html files group under the
    corpus root's name). Pages are loaded and scanned concurrently up to
    `jobs` workers."""
    jobs = jobs or os.cpu_count() or 1
    thresholds = thresholds or ThresholdConfig.uniform()
    reports = []
    for site_id, paths in iter_corpus(corpus_dir):
        def work(path: Path) -> list[DetectionResult]:
            return scan_page(load_page_file(path), backend, thresholds)
        if jobs > 1 and len(paths) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                per_page = list(pool.map(work, paths))
        else:
            per_page = [work(p) for p in paths]
        results = [r for batch in per_page for r in batch]
        reports.append(aggregate(results, mode=mode, site_id=site_id))
    return reports
