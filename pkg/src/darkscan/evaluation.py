"""Dataset handling, metrics, logistic-regression baseline, threshold tuning.

The LR baseline is implemented directly on numpy (TF-IDF features +
multinomial logistic regression by minibatch gradient descent) so it is a
fully deterministic reference backend with checkable gradients.
"""
from __future__ import annotations

import csv
import json
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier.base import CategoryDistribution, ClassifierBackend, softmax
from .detection import ThresholdConfig
from .errors import (ClassTooSmall, DarkScanError, DegenerateData, EmptyInput,
                     FileUnreadable, LengthMismatch, MissingHeader,
                     UnknownLabel)
from .ingest import normalize_text
from .taxonomy import Category, DARK_CATEGORIES, canonical_order, parse_label

# ------------------------------------------------------------------ dataset

@dataclass(frozen=True)
class LabeledExample:
    text: str
    label: Category


@dataclass(frozen=True)
class Reject:
    row: int  # physical CSV row number (header = row 1)
    label: str
    reason: str


def load_dataset(path: str | Path) -> tuple[list[LabeledExample], list[Reject]]:
    """Parse a `text,label` CSV; columns resolved by header name. Unknown
    labels and empty texts land in the rejects list instead of raising."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise FileUnreadable(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except (StopIteration, csv.Error) as exc:
            raise MissingHeader(f"{path} has no header row") from exc
        names = [h.strip().lower() for h in header]
        if "text" not in names or "label" not in names:
            raise MissingHeader(
                f"{path} header must name text and label columns, got {header}")
        text_col, label_col = names.index("text"), names.index("label")
        examples: list[LabeledExample] = []
        rejects: list[Reject] = []
        for row in reader:
            rownum = reader.line_num
            if not row or len(row) <= max(text_col, label_col):
                rejects.append(Reject(rownum, "", "short row"))
                continue
            raw_label = row[label_col]
            text = normalize_text(row[text_col])
            try:
                label = parse_label(raw_label)
            except UnknownLabel:
                rejects.append(Reject(rownum, raw_label, "unknown label"))
                continue
            if not text:
                rejects.append(Reject(rownum, raw_label, "empty text"))
                continue
            examples.append(LabeledExample(text=text, label=label))
    return examples, rejects


def save_dataset(examples: Iterable[LabeledExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        for ex in examples:
            writer.writerow([ex.text, ex.label.display_name])


def split(data: Sequence[LabeledExample],
          ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
          seed: int = 0) -> tuple[list[LabeledExample], list[LabeledExample],
                                  list[LabeledExample]]:
    """Stratified three-way split, deterministic for a given seed."""
    if any(r <= 0 for r in ratios):
        raise ValueError("all three split ratios must be positive")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    groups: dict[Category, list[LabeledExample]] = {}
    for ex in data:
        groups.setdefault(ex.label, []).append(ex)
    small = [c.display_name for c, g in groups.items() if len(g) < 3]
    if small:
        raise ClassTooSmall(
            f"cannot stratify 3 ways, classes with < 3 examples: "
            + ", ".join(sorted(small)))
    rng = random.Random(seed)
    out: tuple[list, list, list] = ([], [], [])
    for cat in canonical_order():  # fixed order keeps the rng stream stable
        group = groups.get(cat)
        if not group:
            continue
        group = list(group)
        rng.shuffle(group)
        counts = _allocate(len(group), ratios)
        i = 0
        for bucket, count in zip(out, counts):
            bucket.extend(group[i:i + count])
            i += count
    return out


def _allocate(n: int, ratios: tuple[float, float, float]) -> list[int]:
    """Largest-remainder apportionment with every bucket >= 1 (n >= 3)."""
    raw = [n * r for r in ratios]
    base = [math.floor(x) for x in raw]
    order = sorted(range(3), key=lambda i: raw[i] - base[i], reverse=True)
    for k in range(n - sum(base)):
        base[order[k % 3]] += 1
    for i in range(3):
        if base[i] == 0:
            donor = max(range(3), key=lambda k: base[k])
            base[donor] -= 1
            base[i] += 1
    return base


# ------------------------------------------------------------------ metrics

@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    per_class: dict[Category, ClassScores]
    macro_f1: float
    confusion: np.ndarray  # 8x8, rows = gold, cols = predicted
    support: dict[Category, int]

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class": {
                c.display_name: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                }
                for c, s in self.per_class.items()
            },
            "confusion": self.confusion.tolist(),
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def compute_metrics(predicted: Sequence[Category],
                    gold: Sequence[Category]) -> EvalMetrics:
    if len(predicted) != len(gold):
        raise LengthMismatch(
            f"{len(predicted)} predictions vs {len(gold)} gold labels")
    if not gold:
        raise EmptyInput("no examples to score")
    order = canonical_order()
    index = {c: i for i, c in enumerate(order)}
    confusion = np.zeros((8, 8), dtype=np.int64)
    for p, g in zip(predicted, gold):
        confusion[index[g], index[p]] += 1
    total = int(confusion.sum())
    accuracy = float(np.trace(confusion)) / total
    per_class: dict[Category, ClassScores] = {}
    for i, cat in enumerate(order):
        tp = float(confusion[i, i])
        precision = _safe_div(tp, float(confusion[:, i].sum()))
        recall = _safe_div(tp, float(confusion[i, :].sum()))
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[cat] = ClassScores(precision, recall, f1)
    macro_f1 = sum(s.f1 for s in per_class.values()) / 8.0
    support = {cat: int(confusion[i, :].sum()) for i, cat in enumerate(order)}
    return EvalMetrics(accuracy=accuracy, per_class=per_class,
                       macro_f1=macro_f1, confusion=confusion, support=support)


# -------------------------------------------------------------- LR baseline

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def _terms(text: str) -> list[str]:
    tokens = _TOKEN_RE.findall(text.lower())
    return tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]


@dataclass
class LRHyperparams:
    learning_rate: float = 0.5
    epochs: int = 30
    l2: float = 1e-4
    batch_size: int = 32
    seed: int = 0
    min_term_freq: int = 2


@dataclass
class LRModel:
    vocabulary: dict[str, int]
    idf: np.ndarray  # (V,)
    weights: np.ndarray  # (8, V+1), last column = bias
    hyperparams: LRHyperparams
    val_accuracy: float | None = None
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.weights)):
            raise DarkScanError("model weights are not finite")
        if sorted(self.vocabulary.values()) != list(range(len(self.vocabulary))):
            raise DarkScanError("vocabulary index must be dense 0..V-1")


def _featurize(texts: Sequence[str], vocabulary: dict[str, int],
               idf: np.ndarray) -> np.ndarray:
    """TF-IDF rows, l2-normalized, with a trailing all-ones bias column."""
    x = np.zeros((len(texts), len(vocabulary) + 1), dtype=np.float64)
    for row, text in enumerate(texts):
        for term in _terms(text):
            col = vocabulary.get(term)
            if col is not None:
                x[row, col] += 1.0
        x[row, :-1] *= idf
        norm = np.linalg.norm(x[row, :-1])
        if norm > 0:
            x[row, :-1] /= norm
        x[row, -1] = 1.0
    return x


def _build_vocabulary(texts: Sequence[str],
                      min_term_freq: int) -> tuple[dict[str, int], np.ndarray]:
    freq: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for text in texts:
        terms = _terms(text)
        for term in terms:
            freq[term] = freq.get(term, 0) + 1
        for term in set(terms):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    kept = sorted(t for t, n in freq.items() if n >= min_term_freq)
    vocabulary = {t: i for i, t in enumerate(kept)}
    n_docs = len(texts)
    idf = np.array(
        [math.log((1 + n_docs) / (1 + doc_freq[t])) + 1.0 for t in kept],
        dtype=np.float64)
    return vocabulary, idf


def lr_loss_and_grad(weights: np.ndarray, x: np.ndarray, y: np.ndarray,
                     l2: float) -> tuple[float, np.ndarray]:
    """Mean cross-entropy + (l2/2)·||W||² over non-bias weights, with its
    analytic gradient. Kept as a standalone function so finite differences
    can check it."""
    scores = x @ weights.T
    z = scores - scores.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - log_norm
    n = len(y)
    nll = -float(logp[np.arange(n), y].mean())
    loss = nll + 0.5 * l2 * float(np.sum(weights[:, :-1] ** 2))
    probs = np.exp(logp)
    probs[np.arange(n), y] -= 1.0
    grad = probs.T @ x / n
    grad[:, :-1] += l2 * weights[:, :-1]
    return loss, grad


def train_lr_baseline(train: Sequence[LabeledExample],
                      val: Sequence[LabeledExample] = (),
                      hyper: LRHyperparams | None = None) -> LRModel:
    if not train:
        raise EmptyInput("empty training set")
    hyper = hyper or LRHyperparams()
    if hyper.epochs < 1:
        raise ValueError("epochs must be >= 1")
    labels = {ex.label for ex in train}
    if len(labels) < 2:
        raise DegenerateData("training set contains a single class")
    texts = [ex.text for ex in train]
    vocabulary, idf = _build_vocabulary(texts, hyper.min_term_freq)
    x = _featurize(texts, vocabulary, idf)
    index = {c: i for i, c in enumerate(canonical_order())}
    y = np.array([index[ex.label] for ex in train], dtype=np.int64)
    weights = np.zeros((8, len(vocabulary) + 1), dtype=np.float64)
    rng = np.random.default_rng(hyper.seed)
    n = len(train)
    batch = max(1, min(hyper.batch_size, n))
    epoch_losses: list[float] = []
    for _ in range(hyper.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, batch):
            sel = perm[start:start + batch]
            _, grad = lr_loss_and_grad(weights, x[sel], y[sel], hyper.l2)
            weights -= hyper.learning_rate * grad
        loss, _ = lr_loss_and_grad(weights, x, y, hyper.l2)
        epoch_losses.append(loss)
    model = LRModel(vocabulary=vocabulary, idf=idf, weights=weights,
                    hyperparams=hyper, epoch_losses=epoch_losses)
    if val:
        predictions = [predict_lr(model, ex.text) for ex in val]
        gold = [ex.label for ex in val]
        model.val_accuracy = compute_metrics(predictions, gold).accuracy
    return model


def lr_classify(model: LRModel, texts: Sequence[str]) -> list[CategoryDistribution]:
    if not texts:
        return []
    x = _featurize(texts, model.vocabulary, model.idf)
    scores = x @ model.weights.T
    return [softmax(row, temperature=1.0) for row in scores]


def predict_lr(model: LRModel, text: str) -> Category:
    vec = lr_classify(model, [text])[0].as_vector()
    return canonical_order()[int(np.argmax(vec))]


class LRBackend(ClassifierBackend):
    name = "lr"

    def __init__(self, model: LRModel):
        self.model = model

    def classify_batch(self, texts: Sequence[str]) -> list[CategoryDistribution]:
        return lr_classify(self.model, texts)


def save_lr_model(model: LRModel, path: str | Path) -> None:
    doc = {
        "vocabulary": model.vocabulary,
        "idf": model.idf.tolist(),
        "weights": model.weights.tolist(),
        "hyperparams": {
            "learning_rate": model.hyperparams.learning_rate,
            "epochs": model.hyperparams.epochs,
            "l2": model.hyperparams.l2,
            "batch_size": model.hyperparams.batch_size,
            "seed": model.hyperparams.seed,
            "min_term_freq": model.hyperparams.min_term_freq,
        },
        "val_accuracy": model.val_accuracy,
        "epoch_losses": model.epoch_losses,
    }
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_lr_model(path: str | Path) -> LRModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return LRModel(
            vocabulary={str(k): int(v) for k, v in doc["vocabulary"].items()},
            idf=np.asarray(doc["idf"], dtype=np.float64),
            weights=np.asarray(doc["weights"], dtype=np.float64),
            hyperparams=LRHyperparams(**doc["hyperparams"]),
            val_accuracy=doc.get("val_accuracy"),
            epoch_losses=list(doc.get("epoch_losses", [])),
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise FileUnreadable(f"cannot load model {path}: {exc}") from exc


# --------------------------------------------------------- threshold tuning

@dataclass(frozen=True)
class Objective:
    """F-measure family: beta weights recall beta-times as much as precision."""
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @classmethod
    def parse(cls, spec: str) -> "Objective":
        spec = spec.strip().lower()
        if spec == "f1":
            return cls(1.0)
        if spec.startswith("fbeta:"):
            return cls(float(spec.split(":", 1)[1]))
        raise ValueError(f"unknown objective {spec!r}, expected f1 or fbeta:<beta>")

    def score(self, tp: int, fp: int, fn: int) -> float:
        b2 = self.beta ** 2
        denom = (1 + b2) * tp + b2 * fn + fp
        return (1 + b2) * tp / denom if denom else 0.0


def tune_thresholds(val_results: Sequence[tuple[CategoryDistribution, Category]],
                    objective: Objective | None = None) -> ThresholdConfig:
    """Per-category one-vs-rest sweep over observed probabilities (0.5 and
    1.0 always included as candidates); ties take the higher threshold."""
    if not val_results:
        raise EmptyInput("no validation results to tune on")
    objective = objective or Objective()
    thresholds: dict[Category, float] = {}
    notes: dict[Category, str] = {}
    for cat in DARK_CATEGORIES:
        probs = [dist[cat] for dist, _ in val_results]
        positive = [gold is cat for _, gold in val_results]
        if not any(positive):
            thresholds[cat] = 1.0
            notes[cat] = "no positive validation examples; flagging disabled"
            continue
        best_t = None
        best_score = -1.0
        for t in sorted(set(probs) | {0.5, 1.0}):
            tp = fp = fn = 0
            for p, is_pos in zip(probs, positive):
                if p >= t:
                    tp += is_pos
                    fp += not is_pos
                elif is_pos:
                    fn += 1
            score = objective.score(tp, fp, fn)
            if score >= best_score:  # ascending sweep: ties keep the higher t
                best_score = score
                best_t = t
        thresholds[cat] = best_t
    return ThresholdConfig(thresholds=thresholds, notes=notes)
