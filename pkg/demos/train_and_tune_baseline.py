"""Train the logistic-regression baseline and tune flag thresholds.

Uses the bundled labeled dataset, reports test metrics, then sweeps the
validation probabilities for per-category thresholds.

    python3 demos/train_and_tune_baseline.py
"""
import json
from pathlib import Path

from darkscan.evaluation import (LRHyperparams, Objective, compute_metrics,
                                 load_dataset, lr_classify, predict_lr, split,
                                 train_lr_baseline, tune_thresholds)
from darkscan.taxonomy import DARK_CATEGORIES

DATASET = Path(__file__).resolve().parents[1] / "data" / "dataset.csv"


def main() -> None:
    data, rejects = load_dataset(DATASET)
    print(f"dataset: {len(data)} rows ({len(rejects)} rejected)")
    train, val, test = split(data, seed=42)
    print(f"split: {len(train)} train / {len(val)} val / {len(test)} test")

    model = train_lr_baseline(train, val, LRHyperparams(seed=42))
    first, last = model.epoch_losses[0], model.epoch_losses[-1]
    print(f"training loss: {first:.4f} -> {last:.4f} "
          f"over {len(model.epoch_losses)} epochs")
    print(f"validation accuracy: {model.val_accuracy:.4f}")

    predicted = [predict_lr(model, ex.text) for ex in test]
    metrics = compute_metrics(predicted, [ex.label for ex in test])
    print(f"test accuracy: {metrics.accuracy:.4f}, "
          f"macro F1: {metrics.macro_f1:.4f}")

    dists = lr_classify(model, [ex.text for ex in val])
    config = tune_thresholds(list(zip(dists, (ex.label for ex in val))),
                             Objective.parse("f1"))
    thresholds = {c.display_name: round(config[c], 4)
                  for c in DARK_CATEGORIES}
    print("tuned thresholds:")
    print(json.dumps(thresholds, indent=2))


if __name__ == "__main__":
    main()
