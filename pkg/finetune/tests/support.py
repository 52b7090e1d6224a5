"""Dataset factories and configuration presets shared across test modules."""
from __future__ import annotations

import csv
from pathlib import Path

from finetune import FinetuneConfig

REPO_ROOT = Path(__file__).resolve().parents[2]
BUNDLED_DATASET = REPO_ROOT / "data" / "dataset.csv"

LABELS = ["Forced Action", "Misdirection", "Not Dark Pattern", "Obstruction",
          "Scarcity", "Sneaking", "Social Proof", "Urgency"]

# one distinctive keyword per label keeps the toy problem separable
_KEYWORDS = {
    "Forced Action": "register",
    "Misdirection": "decline",
    "Not Dark Pattern": "fabric",
    "Obstruction": "cancel",
    "Scarcity": "remaining",
    "Sneaking": "preselected",
    "Social Proof": "reviews",
    "Urgency": "countdown",
}


def write_toy_csv(path: Path, per_label: int = 12) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        for label in LABELS:
            kw = _KEYWORDS[label]
            for i in range(per_label):
                writer.writerow([f"offer {i}: {kw} applies to item {i}",
                                 label])
    return path


def tiny_config(**overrides) -> FinetuneConfig:
    base = dict(epochs=2, learning_rate=1e-3, batch_size=8, seed=0,
                max_seq_len=16, hidden_size=32, num_layers=1, num_heads=4,
                ffn_size=64, min_token_freq=1)
    base.update(overrides)
    return FinetuneConfig(**base)
