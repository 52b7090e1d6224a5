"""Dataset loading and splitting for supervised training.

Reads the same two-column CSV contract the classifier tooling uses
(`text` and `label` headers, any column order) and produces stratified
train/validation/test splits. Unlike the scoring-side loader this one is
strict: a malformed row fails the run instead of being skipped, because
silently training on a damaged dataset is worse than stopping.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DatasetError

REQUIRED_COLUMNS = ("text", "label")
EXPECTED_LABEL_COUNT = 8


@dataclass(frozen=True)
class Example:
    text: str
    label: str


def load_dataset(path: str | Path) -> list[Example]:
    """All rows of a labeled CSV, in file order.

    Raises DatasetError on a missing/unreadable file, absent headers, or
    any row with an empty text or label.
    """
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read dataset: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise DatasetError(f"dataset lacks required columns: {missing}")
        examples: list[Example] = []
        for row in reader:
            text = (row.get("text") or "").strip()
            label = (row.get("label") or "").strip()
            if not text or not label:
                raise DatasetError(
                    f"row {reader.line_num}: empty text or label")
            examples.append(Example(text, label))
    if not examples:
        raise DatasetError("dataset contains no rows")
    return examples


def label_order(examples: list[Example]) -> list[str]:
    """Sorted distinct labels; must be the full eight-class inventory."""
    labels = sorted({e.label for e in examples})
    if len(labels) != EXPECTED_LABEL_COUNT:
        raise DatasetError(
            f"expected {EXPECTED_LABEL_COUNT} distinct labels, "
            f"found {len(labels)}: {labels}")
    return labels


def split_dataset(examples: list[Example], seed: int,
                  val_fraction: float = 0.1, test_fraction: float = 0.1,
                  ) -> tuple[list[Example], list[Example], list[Example]]:
    """Stratified train/val/test partition.

    Every label contributes at least one example to each bucket, so a
    class needs three examples minimum.
    """
    if not 0 < val_fraction < 1 or not 0 < test_fraction < 1 \
            or val_fraction + test_fraction >= 1:
        raise DatasetError("split fractions must leave room for training")
    by_label: dict[str, list[Example]] = {}
    for ex in examples:
        by_label.setdefault(ex.label, []).append(ex)
    rng = random.Random(seed)
    train: list[Example] = []
    val: list[Example] = []
    test: list[Example] = []
    for label in sorted(by_label):
        group = list(by_label[label])
        if len(group) < 3:
            raise DatasetError(
                f"label {label!r} has {len(group)} examples, needs >= 3")
        rng.shuffle(group)
        n_val = max(1, round(len(group) * val_fraction))
        n_test = max(1, round(len(group) * test_fraction))
        val.extend(group[:n_val])
        test.extend(group[n_val:n_val + n_test])
        train.extend(group[n_val + n_test:])
    rng.shuffle(train)
    return train, val, test
