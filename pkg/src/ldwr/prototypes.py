"""Class prototypes: per-class means of (possibly filtered) support descriptors.

A prototype is a single C-dimensional vector because the weighting step takes
its cosine against C-dimensional neighborhood means; the average therefore
runs over all retained descriptors of all the class's support samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateClassError
from .model import Episode


@dataclass(frozen=True)
class ClassPrototype:
    class_index: int
    vector: np.ndarray
    source_count: int

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=np.float64)
        if self.source_count < 1:
            raise DegenerateClassError(
                f"class {self.class_index}: prototype needs at least one descriptor"
            )
        if not np.all(np.isfinite(vector)):
            raise DegenerateClassError(
                f"class {self.class_index}: prototype vector is not finite"
            )
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)


def class_prototype(
    support_descriptors: Sequence[np.ndarray] | np.ndarray, class_index: int = 0
) -> ClassPrototype:
    """Elementwise mean of one class's support descriptors (float64 accumulation)."""
    mat = np.asarray(support_descriptors, dtype=np.float64)
    if mat.ndim != 2 or len(mat) == 0:
        raise DegenerateClassError(
            f"class {class_index}: expected a nonempty list of descriptor vectors"
        )
    return ClassPrototype(class_index, mat.mean(axis=0), len(mat))


def all_prototypes(
    e: Episode, kept: Sequence[np.ndarray] | None = None
) -> list[ClassPrototype]:
    """One prototype per episode class, over kept descriptors only.

    ``kept`` gives per-support-sample retained column indices, aligned with
    ``e.support``; None keeps everything.  A class whose samples retain zero
    descriptors raises :class:`DegenerateClassError`.
    """
    pools: list[list[np.ndarray]] = [[] for _ in range(e.n_way)]
    for s, sample in enumerate(e.support):
        vecs = sample.descriptors.vectors()
        if kept is not None:
            vecs = vecs[np.asarray(kept[s], dtype=np.intp)]
        pools[e.class_index(sample.label)].append(vecs)
    out = []
    for ci, parts in enumerate(pools):
        stacked = np.concatenate(parts) if parts else np.empty((0, 0))
        if stacked.size == 0:
            raise DegenerateClassError(f"class {ci}: no descriptors retained")
        out.append(class_prototype(stacked, ci))
    return out


def prototype_matrix(prototypes: Sequence[ClassPrototype]) -> np.ndarray:
    """(n_way, C) array of prototype vectors, ordered by class index."""
    ordered = sorted(prototypes, key=lambda p: p.class_index)
    return np.stack([p.vector for p in ordered])
