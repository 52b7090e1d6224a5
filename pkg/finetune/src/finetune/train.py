"""Supervised training run: dataset in, artifact directory out.

One call covers the whole pipeline: load and split the CSV, build the
vocabulary from the training split, train the encoder for a fixed number
of epochs, score the held-out test split, export artifacts, and verify
the export round trip. Per-epoch loss, training accuracy, and validation
accuracy are logged as a four-column table and saved alongside the
artifacts so a run's trajectory stays inspectable after the fact.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import torch
from torch import nn

from .data import Example, label_order, load_dataset, split_dataset
from .export import export_artifacts, verify_export
from .model import EncoderConfig, TextEncoder
from .text import Vocabulary

LOG_FILE = "training_log.json"
METRICS_FILE = "metrics.json"

LOG_COLUMNS = ("Epoch", "Loss", "Accuracy", "Validation Accuracy")


@dataclass
class FinetuneConfig:
    epochs: int = 5
    learning_rate: float = 5e-4
    batch_size: int = 16
    seed: int = 0
    max_seq_len: int = 64
    hidden_size: int = 128
    num_layers: int = 2
    num_heads: int = 4
    ffn_size: int = 512
    dropout: float = 0.1
    vocab_cap: int = 8192
    min_token_freq: int = 2
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    weight_decay: float = 0.01
    grad_clip: float = 1.0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class EpochStats:
    epoch: int
    loss: float
    accuracy: float
    val_accuracy: float

    def row(self) -> str:
        return (f"{self.epoch} | {self.loss:.4f} | {self.accuracy:.4f} "
                f"| {self.val_accuracy:.4f}")


@dataclass
class FinetuneResult:
    out_dir: Path
    labels: list[str]
    log: list[EpochStats]
    metrics: dict
    export_drift: float
    model: TextEncoder = field(repr=False)
    vocab: Vocabulary = field(repr=False)

    @property
    def final_val_accuracy(self) -> float:
        return self.log[-1].val_accuracy


def _encode_split(examples: Sequence[Example], vocab: Vocabulary,
                  labels: list[str]) -> tuple[torch.Tensor, ...]:
    ids, mask = vocab.encode_batch([e.text for e in examples])
    targets = [labels.index(e.label) for e in examples]
    return (torch.tensor(ids, dtype=torch.long),
            torch.tensor(mask, dtype=torch.long),
            torch.tensor(targets, dtype=torch.long))


@torch.no_grad()
def _accuracy(model: TextEncoder, ids: torch.Tensor, mask: torch.Tensor,
              targets: torch.Tensor, batch_size: int) -> float:
    model.eval()
    hits = 0
    for start in range(0, len(ids), batch_size):
        sl = slice(start, start + batch_size)
        logits = model(ids[sl], mask[sl])
        hits += int((logits.argmax(dim=1) == targets[sl]).sum())
    return hits / len(ids)


@torch.no_grad()
def _predictions(model: TextEncoder, ids: torch.Tensor, mask: torch.Tensor,
                 batch_size: int) -> list[int]:
    model.eval()
    out: list[int] = []
    for start in range(0, len(ids), batch_size):
        sl = slice(start, start + batch_size)
        out.extend(model(ids[sl], mask[sl]).argmax(dim=1).tolist())
    return out


def compute_metrics(predicted: list[int], gold: list[int],
                    labels: list[str]) -> dict:
    """Accuracy, macro F1, per-class scores, and a gold x predicted
    confusion matrix, all keyed by label name."""
    n = len(labels)
    confusion = np.zeros((n, n), dtype=int)
    for p, g in zip(predicted, gold):
        confusion[g][p] += 1
    per_class: dict[str, dict[str, float]] = {}
    f1_total = 0.0
    for i, label in enumerate(labels):
        tp = int(confusion[i, i])
        fp = int(confusion[:, i].sum()) - tp
        fn = int(confusion[i, :].sum()) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) \
            if precision + recall else 0.0
        per_class[label] = {"precision": precision, "recall": recall,
                            "f1": f1}
        f1_total += f1
    accuracy = float(np.trace(confusion)) / len(gold) if gold else 0.0
    return {
        "accuracy": accuracy,
        "macro_f1": f1_total / n,
        "per_class": per_class,
        "confusion": confusion.tolist(),
    }


def run_finetune(dataset_csv: str | Path, out_dir: str | Path,
                 config: FinetuneConfig | None = None,
                 progress: Callable[[str], None] | None = None,
                 ) -> FinetuneResult:
    config = config or FinetuneConfig()
    say = progress or (lambda line: None)

    examples = load_dataset(dataset_csv)
    labels = label_order(examples)
    train, val, test = split_dataset(
        examples, seed=config.seed,
        val_fraction=config.val_fraction,
        test_fraction=config.test_fraction)
    say(f"dataset: {len(train)} train / {len(val)} val / {len(test)} test")

    vocab = Vocabulary.build(
        (e.text for e in train), max_seq_len=config.max_seq_len,
        max_size=config.vocab_cap, min_freq=config.min_token_freq)
    say(f"vocabulary: {len(vocab)} tokens")

    torch.manual_seed(config.seed)
    model = TextEncoder(EncoderConfig(
        vocab_size=len(vocab), max_seq_len=config.max_seq_len,
        hidden_size=config.hidden_size, num_layers=config.num_layers,
        num_heads=config.num_heads, ffn_size=config.ffn_size,
        num_classes=len(labels), dropout=config.dropout))
    optimizer = torch.optim.AdamW(model.parameters(),
                                  lr=config.learning_rate,
                                  weight_decay=config.weight_decay)
    loss_fn = nn.CrossEntropyLoss()
    shuffler = torch.Generator().manual_seed(config.seed)

    train_ids, train_mask, train_y = _encode_split(train, vocab, labels)
    val_ids, val_mask, val_y = _encode_split(val, vocab, labels)
    test_ids, test_mask, test_y = _encode_split(test, vocab, labels)

    say(" | ".join(LOG_COLUMNS))
    log: list[EpochStats] = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        order = torch.randperm(len(train_ids), generator=shuffler)
        loss_sum = 0.0
        hit_sum = 0
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            logits = model(train_ids[batch], train_mask[batch])
            loss = loss_fn(logits, train_y[batch])
            optimizer.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            optimizer.step()
            loss_sum += loss.item() * len(batch)
            hit_sum += int((logits.argmax(dim=1) == train_y[batch]).sum())
        stats = EpochStats(
            epoch=epoch,
            loss=loss_sum / len(train_ids),
            accuracy=hit_sum / len(train_ids),
            val_accuracy=_accuracy(model, val_ids, val_mask, val_y,
                                   config.batch_size))
        log.append(stats)
        say(stats.row())

    predicted = _predictions(model, test_ids, test_mask, config.batch_size)
    metrics = compute_metrics(predicted, test_y.tolist(), labels)
    say(f"test accuracy: {metrics['accuracy']:.4f}")

    out_dir = export_artifacts(
        model, vocab, labels, out_dir,
        metadata={"training": {**asdict(config),
                               "final_val_accuracy": log[-1].val_accuracy}})
    (out_dir / LOG_FILE).write_text(json.dumps({
        "columns": list(LOG_COLUMNS),
        "final_accuracy": log[-1].val_accuracy,
        "epochs": [asdict(s) for s in log],
    }, indent=2) + "\n", encoding="utf-8")
    (out_dir / METRICS_FILE).write_text(
        json.dumps(metrics, indent=2) + "\n", encoding="utf-8")
    drift = verify_export(model, vocab, out_dir)
    say(f"export verified: max logit drift {drift:.2e}")
    return FinetuneResult(out_dir=out_dir, labels=labels, log=log,
                          metrics=metrics, export_drift=drift,
                          model=model, vocab=vocab)
