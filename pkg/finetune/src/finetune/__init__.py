"""Trains a compact transformer text classifier and exports portable
model artifacts (weights.onnx, vocab.txt, labels.json, config.json)."""
from .data import Example, label_order, load_dataset, split_dataset
from .errors import DatasetError, ExportMismatch, FinetuneError
from .export import (LOGIT_TOLERANCE, PROBE_TEXTS, build_graph,
                     export_artifacts, framework_logits, verify_export)
from .model import EncoderConfig, TextEncoder
from .text import Vocabulary, split_words
from .train import (EpochStats, FinetuneConfig, FinetuneResult,
                    compute_metrics, run_finetune)

__all__ = [
    "DatasetError", "EncoderConfig", "EpochStats", "Example",
    "ExportMismatch", "FinetuneConfig", "FinetuneError", "FinetuneResult",
    "LOGIT_TOLERANCE", "PROBE_TEXTS", "TextEncoder", "Vocabulary",
    "build_graph", "compute_metrics", "export_artifacts",
    "framework_logits", "label_order", "load_dataset", "run_finetune",
    "split_dataset", "split_words", "verify_export",
]
