"""darkscan: audit e-commerce pages for dark-pattern text.

Pipeline: fetch/parse a page, segment its visible text, classify each
segment into eight categories, flag segments that cross per-category
probability thresholds, and aggregate flags into comparable site reports.
"""
from .classifier import (CategoryDistribution, ClassifierBackend,
                         LexicalBackend, Lexicon, ModelArtifacts,
                         RemoteBackend, TransformerBackend, default_lexicon,
                         load_artifacts, softmax)
from .detection import (AggregationMode, ComparisonReport, DetectionResult,
                        SiteReport, ThresholdConfig, aggregate, compare_sites,
                        detect, flag, predict_category)
from .errors import DarkScanError
from .evaluation import (EvalMetrics, LabeledExample, LRBackend, LRModel,
                         Objective, compute_metrics, load_dataset, split,
                         train_lr_baseline, tune_thresholds)
from .ingest import (FetchConfig, PageSource, SegmentationRules, TextSegment,
                     extract_segments, fetch_page, load_page_file,
                     normalize_text, visible_text)
from .report import (parse_report, render_comparison, render_report,
                     report_to_dict, validate_report_dict)
from .scan import scan_corpus, scan_file, scan_html, scan_pages, scan_url
from .taxonomy import Category, canonical_order, parse_label

__version__ = "0.1.0"

__all__ = [
    "AggregationMode", "Category", "CategoryDistribution",
    "ClassifierBackend", "ComparisonReport", "DarkScanError",
    "DetectionResult", "EvalMetrics", "FetchConfig", "LRBackend", "LRModel",
    "LabeledExample", "LexicalBackend", "Lexicon", "ModelArtifacts",
    "Objective", "PageSource", "RemoteBackend", "SegmentationRules",
    "SiteReport", "TextSegment", "ThresholdConfig", "TransformerBackend",
    "aggregate", "canonical_order", "compare_sites", "compute_metrics",
    "default_lexicon", "detect", "extract_segments", "fetch_page", "flag",
    "load_artifacts", "load_dataset", "load_page_file", "normalize_text",
    "parse_label", "parse_report", "predict_category", "render_comparison",
    "render_report", "report_to_dict", "scan_corpus", "scan_file",
    "scan_html", "scan_pages", "scan_url", "softmax", "split",
    "train_lr_baseline", "tune_thresholds", "validate_report_dict",
    "visible_text", "__version__",
]
