"""Independent reference implementations used to check the engine.

Everything here is deliberately plain Python: lists, explicit loops, and
``math.fsum``.  No numpy, no shared helpers with the package under test, so
agreement between the two is evidence rather than tautology.

Conventions: a "vector" is a list of floats (one descriptor, one prototype);
a "sample" is a list of vectors.
"""

from __future__ import annotations

import math

Vector = list[float]


def dot(a: Vector, b: Vector) -> float:
    return math.fsum(x * y for x, y in zip(a, b))


def norm(a: Vector) -> float:
    return math.sqrt(math.fsum(x * x for x in a))


def cosine(a: Vector, b: Vector) -> float:
    na, nb = norm(a), norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot(a, b) / (na * nb)))


def knn_indices(
    query: Vector,
    pool: list[Vector],
    k: int,
    include_self: bool = False,
    self_index: int | None = None,
) -> list[int]:
    """Indices of the k most cosine-similar pool vectors, ties by lower index."""
    candidates = [
        i
        for i in range(len(pool))
        if include_self or self_index is None or i != self_index
    ]
    if k > len(candidates):
        raise ValueError(f"k={k} exceeds candidate pool of {len(candidates)}")
    ranked = sorted(candidates, key=lambda i: (-cosine(query, pool[i]), i))
    return ranked[:k]


def neighborhood_representation(
    vectors: list[Vector], k: int, include_self: bool = False
) -> list[Vector]:
    """Each vector replaced by the mean of its k nearest peers (itself excluded
    unless include_self)."""
    out = []
    for i, v in enumerate(vectors):
        idx = knn_indices(v, vectors, k, include_self=include_self, self_index=i)
        out.append(
            [math.fsum(vectors[j][c] for j in idx) / k for c in range(len(v))]
        )
    return out


def descriptor_weights(
    nr_vectors: list[Vector], prototypes: list[Vector]
) -> list[list[float]]:
    """Score matrix S[c][i] = cosine(prototype c, vector i)."""
    return [[cosine(p, v) for v in nr_vectors] for p in prototypes]


def aggregate_weights(S: list[list[float]]) -> list[float]:
    """Class-averaged weight of each descriptor."""
    n_way = len(S)
    t = len(S[0])
    return [math.fsum(S[c][i] for c in range(n_way)) / n_way for i in range(t)]


def threshold_stats(values: list[float]) -> tuple[float, float]:
    """Mean and population standard deviation."""
    n = len(values)
    mu = math.fsum(values) / n
    var = math.fsum((v - mu) ** 2 for v in values) / n
    return mu, math.sqrt(var)


def filter_once(
    weights_per_sample: list[list[float]],
    mu: float,
    sigma: float,
    min_keep_fraction: float,
) -> list[list[int]]:
    """Positions with weight >= mu - sigma, floored at ceil(fraction * T) by
    keeping the top-weight positions."""
    thr = mu - sigma
    out = []
    for ws in weights_per_sample:
        kept = [i for i, w in enumerate(ws) if w >= thr]
        floor = math.ceil(min_keep_fraction * len(ws))
        if len(kept) < floor:
            ranked = sorted(range(len(ws)), key=lambda i: (-ws[i], i))
            kept = sorted(ranked[:floor])
        out.append(kept)
    return out


def mean_vector(vectors: list[Vector]) -> Vector:
    n = len(vectors)
    dim = len(vectors[0])
    return [math.fsum(v[c] for v in vectors) / n for c in range(dim)]


def iterative_filter(
    vectors_per_sample: list[list[Vector]],
    nrs_per_sample: list[list[Vector]],
    class_of_sample: list[int],
    n_way: int,
    c_stop: float,
    max_iterations: int,
    min_keep_fraction: float,
    mode: str = "averaged",
):
    """Full support-filtering loop.

    Returns (kept, weights, mu, sigma, sigma0, iterations, counts_history)
    mirroring the engine's result fields.
    """
    kept = [list(range(len(v))) for v in vectors_per_sample]
    history = [[len(k) for k in kept]]
    sigma0 = 0.0
    it = 0
    while True:
        it += 1
        protos = []
        for c in range(n_way):
            pool = [
                vectors_per_sample[s][i]
                for s in range(len(kept))
                if class_of_sample[s] == c
                for i in kept[s]
            ]
            protos.append(mean_vector(pool))
        avg, rank, pooled = [], [], []
        for s, k in enumerate(kept):
            S = descriptor_weights([nrs_per_sample[s][i] for i in k], protos)
            w = aggregate_weights(S)
            avg.append(w)
            if mode == "per_class":
                rank.append([max(S[c][j] for c in range(n_way)) for j in range(len(k))])
                pooled.extend(v for row in S for v in row)
            else:
                rank.append(w)
                pooled.extend(w)
        mu, sigma = threshold_stats(pooled)
        if it == 1:
            sigma0 = sigma
        if sigma < sigma0 / c_stop:
            break
        new_local = filter_once(rank, mu, sigma, min_keep_fraction)
        removed = any(len(nl) < len(k) for nl, k in zip(new_local, kept))
        if removed:
            kept = [[k[j] for j in nl] for k, nl in zip(kept, new_local)]
            avg = [[w[j] for j in nl] for w, nl in zip(avg, new_local)]
        history.append([len(k) for k in kept])
        if not removed or it >= max_iterations:
            break
    return kept, avg, mu, sigma, sigma0, it, history


def image_to_class_score(
    query_vectors: list[Vector], pool_vectors: list[Vector], k_bar: int
) -> float:
    """Sum over query descriptors of their k_bar best cosines in the pool."""
    k_eff = min(k_bar, len(pool_vectors))
    terms = []
    for q in query_vectors:
        sims = sorted((cosine(q, p) for p in pool_vectors), reverse=True)
        terms.extend(sims[:k_eff])
    return math.fsum(terms)


def softmax(scores: list[float]) -> list[float]:
    m = max(scores)
    exps = [math.exp(s - m) for s in scores]
    z = math.fsum(exps)
    return [e / z for e in exps]


def l2_normalize(vectors: list[Vector]) -> list[Vector]:
    out = []
    for v in vectors:
        n = norm(v)
        out.append(list(v) if n == 0.0 else [x / n for x in v])
    return out


def spatial_normalize(
    columns: list[Vector], a1: float, b1: float, a2: float, b2: float, eps: float
) -> list[Vector]:
    """columns[i] is the channel vector at position i; returns same layout."""
    out = []
    for col in columns:
        c = len(col)
        mu = math.fsum(col) / c
        var = math.fsum((x - mu) ** 2 for x in col) / c
        gate = a1 * mu + b1
        shift = a2 * mu + b2
        out.append([(x - mu) / math.sqrt(var + eps) * gate + shift for x in col])
    return out


def channel_normalize(
    columns: list[Vector], gamma: list[float], beta: list[float], eps: float
) -> list[Vector]:
    n = len(columns)
    channels = len(columns[0])
    out = [[0.0] * channels for _ in range(n)]
    for ch in range(channels):
        row = [col[ch] for col in columns]
        mu = math.fsum(row) / n
        var = math.fsum((x - mu) ** 2 for x in row) / n
        for i in range(n):
            z = (columns[i][ch] - mu) / math.sqrt(var + eps)
            out[i][ch] = gamma[ch] * z + beta[ch]
    return out


def cross_normalize(
    columns: list[Vector],
    gamma: list[float],
    beta: list[float],
    a1: float,
    b1: float,
    a2: float,
    b2: float,
    omega1: float,
    omega2: float,
    eps: float,
) -> list[Vector]:
    xs = spatial_normalize(columns, a1, b1, a2, b2, eps)
    xc = channel_normalize(columns, gamma, beta, eps)
    w1 = omega1 / (omega1 + omega2)
    w2 = 1.0 - w1
    return [
        [w1 * s + w2 * c for s, c in zip(srow, crow)]
        for srow, crow in zip(xs, xc)
    ]
