"""Onboard neural inference backend.

Loads a ModelArtifacts directory (weights.onnx + vocab.txt + labels.json +
config.json) and classifies text batches through the bundled graph executor.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ArtifactLoadError, ShapeMismatch
from ..onnx_graph import Graph, GraphRunner, load_model
from ..taxonomy import Category, canonical_order, parse_label
from .base import CategoryDistribution, ClassifierBackend, softmax
from .tokenizer import WordPieceTokenizer, load_vocab

WEIGHTS_FILE = "weights.onnx"
VOCAB_FILE = "vocab.txt"
LABELS_FILE = "labels.json"
CONFIG_FILE = "config.json"


@dataclass
class ModelArtifacts:
    vocab: dict[str, int]
    graph: Graph
    max_seq_len: int = 128
    lowercase: bool = True
    label_order: tuple[Category, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_seq_len < 8:
            raise ArtifactLoadError("max_seq_len must be >= 8")
        if (len(self.label_order) != len(canonical_order())
                or set(self.label_order) != set(canonical_order())):
            raise ArtifactLoadError(
                "label order must be a permutation of the 8 category names")


def load_artifacts(model_dir: str | Path) -> ModelArtifacts:
    model_dir = Path(model_dir)
    for fname in (WEIGHTS_FILE, VOCAB_FILE, LABELS_FILE, CONFIG_FILE):
        if not (model_dir / fname).is_file():
            raise ArtifactLoadError(f"missing {fname} in {model_dir}")
    try:
        config = json.loads((model_dir / CONFIG_FILE).read_text(encoding="utf-8"))
        labels = json.loads((model_dir / LABELS_FILE).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ArtifactLoadError(f"unparseable artifact JSON: {exc}") from exc
    if not isinstance(labels, list):
        raise ArtifactLoadError("labels.json must be a JSON list")
    label_order = tuple(parse_label(l) for l in labels)
    vocab = load_vocab(model_dir / VOCAB_FILE)
    graph = load_model(model_dir / WEIGHTS_FILE)
    return ModelArtifacts(
        vocab=vocab,
        graph=graph,
        max_seq_len=int(config.get("max_seq_len", 128)),
        lowercase=bool(config.get("lowercase", True)),
        label_order=label_order,
        metadata=config.get("metadata", {}),
    )


class TransformerBackend(ClassifierBackend):
    name = "transformer"

    def __init__(self, artifacts: ModelArtifacts, batch_size: int = 32):
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        self.artifacts = artifacts
        self.batch_size = batch_size
        self.tokenizer = WordPieceTokenizer(
            artifacts.vocab, artifacts.max_seq_len, artifacts.lowercase)
        self.runner = GraphRunner(artifacts.graph)
        feeds = self.runner.feed_names()
        if not 1 <= len(feeds) <= 2:
            raise ArtifactLoadError(
                f"expected graph feeds (ids[, mask]), found {feeds}")
        self._ids_feed = feeds[0]
        self._mask_feed = None
        if len(feeds) == 2:
            # pick the mask feed by name, positionally otherwise
            masks = [f for f in feeds if "mask" in f.lower()]
            self._mask_feed = masks[0] if masks else feeds[1]
            self._ids_feed = next(f for f in feeds if f != self._mask_feed)
        # canonical position of each model output column
        self._reorder = [self.artifacts.label_order.index(c)
                         for c in canonical_order()]

    def _logits(self, texts: Sequence[str]) -> np.ndarray:
        ids, masks = self.tokenizer.encode_batch(texts)
        feeds = {self._ids_feed: np.asarray(ids, dtype=np.int64)}
        if self._mask_feed:
            feeds[self._mask_feed] = np.asarray(masks, dtype=np.int64)
        outputs = self.runner.run(feeds)
        logits = np.asarray(outputs[self.artifacts.graph.output_names[0]])
        if logits.ndim != 2 or logits.shape != (len(texts), 8):
            raise ShapeMismatch(
                f"model produced logits of shape {logits.shape}, "
                f"expected ({len(texts)}, 8)")
        return logits.astype(np.float64)

    def classify_batch(self, texts: Sequence[str]) -> list[CategoryDistribution]:
        results: list[CategoryDistribution] = []
        for start in range(0, len(texts), self.batch_size):
            chunk = list(texts[start:start + self.batch_size])
            if not chunk:
                continue
            logits = self._logits(chunk)
            for row in logits:
                results.append(softmax(row[self._reorder], temperature=1.0))
        return results


def transformer_classify(texts: Sequence[str],
                         artifacts: ModelArtifacts) -> list[CategoryDistribution]:
    return TransformerBackend(artifacts).classify_batch(texts)
