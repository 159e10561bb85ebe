"""Image-to-class scoring over filtered descriptors and softmax probabilities.

A query image's score for a class is the sum, over its retained descriptors,
of the cosine similarities to that descriptor's own k-bar nearest neighbors
inside the class's retained descriptor pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateClassError
from .vecops import cosine_matrix


@dataclass(frozen=True)
class ClassifierConfig:
    """Neighbors per query descriptor; clamps to the pool size when filtering
    leaves a class pool smaller than k_bar (filtering intensity should not
    crash classification)."""

    k_bar: int = 3

    def __post_init__(self):
        if self.k_bar < 1:
            raise ConfigurationError(f"k_bar must be positive, got {self.k_bar}")


@dataclass(frozen=True)
class ClassScores:
    """Per-class similarity sums, softmax probabilities, and the argmax."""

    scores: np.ndarray
    probabilities: np.ndarray
    predicted: int

    def __post_init__(self):
        for name in ("scores", "probabilities"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


def image_to_class_score(
    query_kept: np.ndarray, class_pool: np.ndarray, cfg: ClassifierConfig
) -> float:
    """Sum of each query descriptor's k-bar best cosine matches in the pool."""
    query_kept = np.asarray(query_kept, dtype=np.float64)
    class_pool = np.asarray(class_pool, dtype=np.float64)
    if len(class_pool) == 0:
        raise DegenerateClassError("class pool is empty")
    if len(query_kept) == 0:
        raise ConfigurationError("query has no retained descriptors")
    k_eff = min(cfg.k_bar, len(class_pool))
    sims = cosine_matrix(query_kept, class_pool)
    top = np.sort(sims, axis=1)[:, len(class_pool) - k_eff :]
    return float(top.sum(dtype=np.float64))


def softmax(scores: np.ndarray) -> np.ndarray:
    """Numerically stable softmax (max-subtracted)."""
    scores = np.asarray(scores, dtype=np.float64)
    shifted = scores - scores.max()
    e = np.exp(shifted)
    return e / e.sum(dtype=np.float64)


def classify(
    query_kept: np.ndarray,
    per_class_pools: Sequence[np.ndarray],
    cfg: ClassifierConfig,
) -> ClassScores:
    """Score every class pool and pick the argmax (ties go to the lowest index)."""
    scores = np.array(
        [image_to_class_score(query_kept, pool, cfg) for pool in per_class_pools],
        dtype=np.float64,
    )
    probabilities = softmax(scores)
    return ClassScores(
        scores=scores,
        probabilities=probabilities,
        predicted=int(np.argmax(scores)),
    )
