"""Exact k-NN among an image's local descriptors and neighborhood means.

Each descriptor is replaced (for weighting purposes) by the mean of its k most
cosine-similar peers from the same image, which smooths local noise.  Search
is exact brute force: pools are at most a few thousand descriptors, and the
oracle tests need exactness.  The O(N^2 * C) similarity kernel is the hot
spot, so it runs as one matrix product per image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .vecops import unit_rows


@dataclass(frozen=True)
class NeighborhoodConfig:
    """k-NN settings: neighbor count and whether a descriptor may be its own
    neighbor (default no: neighbors are the *other* descriptors)."""

    k_neighbors: int = 10
    include_self: bool = False

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ConfigurationError(
                f"k_neighbors must be positive, got {self.k_neighbors}"
            )


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    A zero-norm argument yields similarity 0 (uninformative descriptor
    convention), never a division error.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigurationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # Pre-scale by the largest magnitude so squaring cannot overflow.
    ma = float(np.max(np.abs(a), initial=0.0))
    mb = float(np.max(np.abs(b), initial=0.0))
    if ma == 0.0 or mb == 0.0:
        return 0.0
    a = a / ma
    b = b / mb
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _check_pool(k: int, available: int) -> None:
    if available < k:
        raise ConfigurationError(
            f"k_neighbors={k} exceeds the available pool of {available} descriptors"
        )


def knn_indices(
    q: np.ndarray,
    pool: np.ndarray,
    cfg: NeighborhoodConfig,
    self_index: int | None = None,
) -> np.ndarray:
    """Indices of the k pool entries most cosine-similar to ``q``.

    Returned in descending similarity order; ties break toward the lower
    index, so results are deterministic across platforms.  ``self_index``
    marks q's own position when q is drawn from the pool; it is excluded
    unless ``cfg.include_self``.
    """
    pool = np.asarray(pool, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    exclude = self_index if (self_index is not None and not cfg.include_self) else None
    _check_pool(cfg.k_neighbors, len(pool) - (0 if exclude is None else 1))
    qn = np.linalg.norm(q)
    sims = unit_rows(pool) @ (q / qn if qn > 0.0 else np.zeros_like(q))
    if exclude is not None:
        sims = sims.copy()
        sims[exclude] = -np.inf
    order = np.argsort(-sims, kind="stable")
    return order[: cfg.k_neighbors]


def neighborhood_representation(
    d_all: np.ndarray, cfg: NeighborhoodConfig
) -> np.ndarray:
    """Mean of each descriptor's k nearest neighbors, one row per descriptor.

    ``d_all`` is the (N, C) descriptor pool of a single image; neighbors are
    searched within that pool only, which keeps support and query symmetric
    and episodes independent.
    """
    d_all = np.asarray(d_all, dtype=np.float64)
    n = len(d_all)
    _check_pool(cfg.k_neighbors, n if cfg.include_self else n - 1)
    sims = unit_rows(d_all)
    sims = sims @ sims.T
    if not cfg.include_self:
        np.fill_diagonal(sims, -np.inf)
    order = np.argsort(-sims, axis=1, kind="stable")[:, : cfg.k_neighbors]
    return d_all[order].mean(axis=1)
