"""Probability distributions over the category space and the backend contract."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import InvalidDistribution, NonFinite
from ..taxonomy import Category, canonical_order

SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class CategoryDistribution:
    """Normalized probability vector over all 8 categories."""

    probs: Mapping[Category, float]

    def __post_init__(self) -> None:
        missing = [c for c in canonical_order() if c not in self.probs]
        if missing:
            raise InvalidDistribution(f"missing categories: {missing}")
        total = 0.0
        for cat, p in self.probs.items():
            if not isinstance(cat, Category):
                raise InvalidDistribution(f"non-category key: {cat!r}")
            if not np.isfinite(p) or p < -1e-12 or p > 1.0 + 1e-9:
                raise InvalidDistribution(f"probability out of range for {cat}: {p}")
            total += p
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")

    def __getitem__(self, category: Category) -> float:
        return self.probs[category]

    def as_vector(self) -> np.ndarray:
        """Probabilities as a float64 vector in canonical order."""
        return np.array([self.probs[c] for c in canonical_order()], dtype=np.float64)

    @classmethod
    def from_vector(cls, vec: Sequence[float]) -> "CategoryDistribution":
        cats = canonical_order()
        if len(vec) != len(cats):
            raise InvalidDistribution(f"expected {len(cats)} entries, got {len(vec)}")
        return cls({c: float(p) for c, p in zip(cats, vec)})

    @classmethod
    def uniform(cls) -> "CategoryDistribution":
        cats = canonical_order()
        return cls({c: 1.0 / len(cats) for c in cats})


def softmax(scores: Sequence[float], temperature: float = 1.0) -> CategoryDistribution:
    """Temperature softmax over an 8-score vector, stabilized by max-subtraction."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    arr = np.asarray(scores, dtype=np.float64)
    if arr.shape != (len(canonical_order()),):
        raise ValueError(f"expected 8 scores, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"non-finite score in {arr.tolist()}")
    z = arr / temperature
    z = z - z.max()
    expz = np.exp(z)
    return CategoryDistribution.from_vector(expz / expz.sum())


class ClassifierBackend(ABC):
    """A named, deterministic mapping from text batches to distributions.

    Implementations must be safe for concurrent read-only use once built and
    must preserve input order: output[i] corresponds to texts[i].
    """

    name: str = "abstract"

    @abstractmethod
    def classify_batch(self, texts: Sequence[str]) -> list[CategoryDistribution]:
        ...

    def classify(self, text: str) -> CategoryDistribution:
        return self.classify_batch([text])[0]
