"""Small shared vector kernels used by the similarity-based modules.

Everything here computes in float64 regardless of input dtype; zero-norm
vectors are treated as uninformative and produce similarity 0.
"""

from __future__ import annotations

import numpy as np


def unit_rows(a: np.ndarray) -> np.ndarray:
    """Row-normalize a 2-D array; zero rows come back as zero rows."""
    a = np.asarray(a, dtype=np.float64)
    norms = np.linalg.norm(a, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    return a / safe[:, None]


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities, shape (len(a), len(b)), clipped to [-1, 1]."""
    sims = unit_rows(a) @ unit_rows(b).T
    return np.clip(sims, -1.0, 1.0)
