"""Dynamically weighted descriptor filtering.

Each descriptor's neighborhood mean is scored by cosine against every class
prototype; the class-averaged score is its weight.  Descriptors whose weight
falls below ``mean - std`` of all weights in the set are dropped, prototypes
are recomputed over the survivors, and the round repeats until the weight
spread has shrunk below ``initial_std / c_stop`` (or nothing was removed, or
the iteration cap is hit).  Query samples are then filtered in a single pass
against the final support prototypes.

The threshold applies to the class-averaged weight: the mean/std statistics
are defined over that quantity, so averaging is the only reading where the
statistics and the filter operate on the same values.  A per-class variant
(stats over the raw per-class scores, keep a descriptor if its best class
score clears the threshold) is available as ``mode="per_class"`` for study.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateStatisticsError
from .model import Episode
from .prototypes import ClassPrototype, class_prototype, prototype_matrix
from .vecops import cosine_matrix

FILTER_MODES = ("averaged", "per_class")


@dataclass(frozen=True)
class FilterConfig:
    """Stopping and safety knobs of the iterative filter.

    ``c_stop`` must exceed 1 or the loop could never run; ``max_iterations``
    is a hard termination cap; ``min_keep_fraction`` is the floor fraction of
    descriptors every sample retains in a filtering pass (prototypes and the
    classifier need nonempty pools).
    """

    c_stop: float = 2.0
    max_iterations: int = 10
    min_keep_fraction: float = 0.1
    mode: str = "averaged"

    def __post_init__(self):
        if not self.c_stop > 1.0:
            raise ConfigurationError(f"c_stop must exceed 1, got {self.c_stop}")
        if self.max_iterations < 1:
            raise ConfigurationError(
                f"max_iterations must be at least 1, got {self.max_iterations}"
            )
        if not 0.0 < self.min_keep_fraction <= 1.0:
            raise ConfigurationError(
                f"min_keep_fraction must be in (0, 1], got {self.min_keep_fraction}"
            )
        if self.mode not in FILTER_MODES:
            raise ConfigurationError(
                f"mode must be one of {FILTER_MODES}, got {self.mode!r}"
            )


@dataclass(frozen=True)
class FilterResult:
    """Outcome of filtering one sample set.

    ``kept[s]`` holds the retained original descriptor indices of sample s,
    strictly increasing; ``weights[s]`` holds the final-round average weights
    of exactly those retained descriptors (index-aligned with ``kept[s]``).
    ``sigma_bar_0`` is the weight spread before any removal; ``mu_bar`` and
    ``sigma_bar`` are the statistics of the final round.
    ``kept_counts_history[0]`` is the per-sample descriptor count before any
    removal; each later entry is the count after one thresholding pass, so
    consecutive entries never increase.
    """

    kept: tuple[np.ndarray, ...]
    weights: tuple[np.ndarray, ...]
    mu_bar: float
    sigma_bar: float
    sigma_bar_0: float
    iterations: int
    kept_counts_history: tuple[tuple[int, ...], ...]

    def kept_fraction(self, totals: Sequence[int]) -> float:
        return float(sum(len(k) for k in self.kept)) / float(sum(totals))


def descriptor_weights(
    nr: np.ndarray, prototypes: Sequence[ClassPrototype] | np.ndarray
) -> np.ndarray:
    """Cosine of every neighborhood vector against every class prototype.

    Returns an (n_way, T) matrix: row c holds descriptor scores for class c.
    """
    protos = (
        np.asarray(prototypes, dtype=np.float64)
        if isinstance(prototypes, np.ndarray)
        else prototype_matrix(prototypes)
    )
    return cosine_matrix(protos, np.asarray(nr, dtype=np.float64))


def aggregate_weights(S: np.ndarray) -> np.ndarray:
    """Average each descriptor's scores over the classes: the (T,) weight vector."""
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] < 1:
        raise ConfigurationError(f"expected a (n_way, T) score matrix, got {S.shape}")
    return S.mean(axis=0)


def threshold_stats(all_weights: np.ndarray) -> tuple[float, float]:
    """Mean and population standard deviation of the pooled weights.

    Accumulates in float64 regardless of input dtype.  Fewer than two values
    cannot define a spread and raise :class:`DegenerateStatisticsError`.
    """
    values = np.asarray(all_weights, dtype=np.float64).ravel()
    if values.size < 2:
        raise DegenerateStatisticsError(
            f"need at least 2 weights for threshold statistics, got {values.size}"
        )
    mu = float(values.mean())
    sigma = float(np.sqrt(np.mean((values - mu) ** 2)))
    return mu, sigma


def filter_once(
    weights: Sequence[np.ndarray],
    mu_bar: float,
    sigma_bar: float,
    cfg: FilterConfig,
) -> list[np.ndarray]:
    """One thresholding pass: keep positions with weight >= mu_bar - sigma_bar.

    ``weights[s]`` are the weights of the descriptors currently under
    consideration for sample s; returned arrays index into those vectors
    (ascending).  If the rule would leave a sample with fewer than
    ``ceil(min_keep_fraction * T)`` descriptors, the highest-weight positions
    are kept to meet the floor instead.
    """
    threshold = mu_bar - sigma_bar
    out = []
    for w in weights:
        w = np.asarray(w, dtype=np.float64)
        t = len(w)
        floor = int(np.ceil(cfg.min_keep_fraction * t))
        kept = np.nonzero(w >= threshold)[0]
        if len(kept) < floor:
            by_weight = np.argsort(-w, kind="stable")
            kept = np.sort(by_weight[:floor])
        out.append(kept.astype(np.intp))
    return out


def _class_pools(
    vecs: Sequence[np.ndarray],
    kept: Sequence[np.ndarray],
    class_of_sample: Sequence[int],
    n_way: int,
) -> list[np.ndarray]:
    pools: list[list[np.ndarray]] = [[] for _ in range(n_way)]
    for v, k, c in zip(vecs, kept, class_of_sample):
        pools[c].append(v[k])
    return [np.concatenate(p) for p in pools]


def _prototypes_over(
    vecs: Sequence[np.ndarray],
    kept: Sequence[np.ndarray],
    class_of_sample: Sequence[int],
    n_way: int,
) -> list[ClassPrototype]:
    return [
        class_prototype(pool, ci)
        for ci, pool in enumerate(_class_pools(vecs, kept, class_of_sample, n_way))
    ]


def _round_weights(
    nrs: Sequence[np.ndarray],
    kept: Sequence[np.ndarray],
    protos: np.ndarray,
    mode: str,
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Per-sample average weights, per-sample ranking values, pooled stat values."""
    avg, rank, pooled = [], [], []
    for nr, k in zip(nrs, kept):
        S = descriptor_weights(nr[k], protos)
        w = aggregate_weights(S)
        avg.append(w)
        if mode == "per_class":
            rank.append(S.max(axis=0))
            pooled.append(S.ravel())
        else:
            rank.append(w)
            pooled.append(w)
    return avg, rank, np.concatenate(pooled)


def iterative_filter_support(
    e: Episode, nr_support: Sequence[np.ndarray], cfg: FilterConfig
) -> tuple[FilterResult, list[ClassPrototype]]:
    """Filter the support set to convergence and return the final prototypes.

    Each round recomputes prototypes over the currently kept descriptors
    (everything at round 1), scores the kept neighborhood vectors, and stops
    when the weight spread drops below ``sigma_bar_0 / c_stop``; otherwise one
    thresholding pass runs and the loop repeats until nothing is removed or
    ``max_iterations`` rounds have run.  Kept sets never grow, and released
    index sets always refer to original descriptor columns.
    """
    vecs = [s.descriptors.vectors() for s in e.support]
    nrs = [np.asarray(nr, dtype=np.float64) for nr in nr_support]
    class_of_sample = e.support_class_indices()
    kept = [np.arange(len(v), dtype=np.intp) for v in vecs]
    history = [tuple(len(k) for k in kept)]

    sigma0 = 0.0
    iterations = 0
    while True:
        iterations += 1
        protos = prototype_matrix(
            _prototypes_over(vecs, kept, class_of_sample, e.n_way)
        )
        avg, rank, pooled = _round_weights(nrs, kept, protos, cfg.mode)
        mu, sigma = threshold_stats(pooled)
        if iterations == 1:
            sigma0 = sigma
        if sigma < sigma0 / cfg.c_stop:
            break
        new_local = filter_once(rank, mu, sigma, cfg)
        removed = any(len(nl) < len(k) for nl, k in zip(new_local, kept))
        if removed:
            kept = [k[nl] for k, nl in zip(kept, new_local)]
            avg = [w[nl] for w, nl in zip(avg, new_local)]
        history.append(tuple(len(k) for k in kept))
        if not removed or iterations >= cfg.max_iterations:
            break

    final_protos = _prototypes_over(vecs, kept, class_of_sample, e.n_way)
    result = FilterResult(
        kept=tuple(kept),
        weights=tuple(avg),
        mu_bar=mu,
        sigma_bar=sigma,
        sigma_bar_0=sigma0,
        iterations=iterations,
        kept_counts_history=tuple(history),
    )
    return result, final_protos


def filter_query(
    query_nr: Sequence[np.ndarray],
    final_prototypes: Sequence[ClassPrototype],
    cfg: FilterConfig,
    stats: tuple[float, float] | None = None,
) -> FilterResult:
    """Single filtering pass over the query set against fixed prototypes.

    Prototypes are never updated from query data.  Statistics default to the
    query set's own pooled weights; pass ``stats=(mu, sigma)`` to reuse the
    support-side values instead.
    """
    protos = prototype_matrix(list(final_prototypes))
    nrs = [np.asarray(nr, dtype=np.float64) for nr in query_nr]
    everything = [np.arange(len(nr), dtype=np.intp) for nr in nrs]
    avg, rank, pooled = _round_weights(nrs, everything, protos, cfg.mode)
    mu, sigma = threshold_stats(pooled) if stats is None else stats
    kept = filter_once(rank, mu, sigma, cfg)
    return FilterResult(
        kept=tuple(kept),
        weights=tuple(w[k] for w, k in zip(avg, kept)),
        mu_bar=mu,
        sigma_bar=sigma,
        sigma_bar_0=sigma,
        iterations=1,
        kept_counts_history=(
            tuple(len(nr) for nr in nrs),
            tuple(len(k) for k in kept),
        ),
    )
