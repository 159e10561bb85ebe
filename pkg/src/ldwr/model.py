"""Core data types: descriptor tensors, labeled samples, and episodes.

These types are the shared vocabulary of every other module.  All of them are
immutable after construction (arrays are marked read-only), so they can be
shared freely across concurrent evaluation workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

_FLOAT_DTYPES = (np.float32, np.float64)


def _frozen_array(a: np.ndarray, dtype=None) -> np.ndarray:
    """Contiguous read-only copy; leaves the caller's array untouched."""
    out = np.array(a, dtype=dtype, copy=True, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DescriptorSet:
    """One image's local descriptors as a C x N real matrix, N = H*W.

    Column ``i`` is the descriptor at spatial position ``(h, w)`` with
    ``i = h*W + w`` (row-major over positions); every transformation in the
    engine preserves that column order, so retained-descriptor index sets stay
    meaningful across modules.
    """

    channels: int
    height: int
    width: int
    data: np.ndarray

    def __post_init__(self):
        if self.channels < 1 or self.height < 1 or self.width < 1:
            raise ValueError(
                f"dimensions must be positive, got C={self.channels} "
                f"H={self.height} W={self.width}"
            )
        data = np.asarray(self.data)
        dtype = data.dtype if data.dtype in _FLOAT_DTYPES else np.float64
        n = self.height * self.width
        if data.shape != (self.channels, n):
            raise ValueError(
                f"data shape {data.shape} does not match C x H*W = "
                f"({self.channels}, {n})"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("descriptor data contains non-finite values")
        object.__setattr__(self, "data", _frozen_array(data, dtype=dtype))

    @property
    def n_positions(self) -> int:
        return self.height * self.width

    def vectors(self) -> np.ndarray:
        """Descriptors as an (N, C) float64 array, one row per position."""
        return np.asarray(self.data.T, dtype=np.float64)

    def with_data(self, data: np.ndarray) -> "DescriptorSet":
        """Same spatial layout with replaced values (shape must match)."""
        return DescriptorSet(self.channels, self.height, self.width, data)


def flatten(d: DescriptorSet) -> list[np.ndarray]:
    """Columns of ``d.data`` in position order: N descriptor vectors of size C."""
    return [d.data[:, i] for i in range(d.n_positions)]


def unflatten(vectors: Sequence[np.ndarray], height: int, width: int) -> DescriptorSet:
    """Inverse of :func:`flatten` for a row-major position ordering."""
    cols = np.stack([np.asarray(v) for v in vectors], axis=1)
    return DescriptorSet(cols.shape[0], height, width, cols)


@dataclass(frozen=True)
class LabeledSample:
    """A descriptor set with its class label and a dataset-unique id."""

    descriptors: DescriptorSet
    label: str
    sample_id: str


@dataclass(frozen=True)
class Episode:
    """An N-way K-shot task: a class-grouped support set plus a query set.

    ``classes`` fixes the episode-local dense index of each class label:
    samples of ``classes[i]`` occupy ``support[i*k_shot : (i+1)*k_shot]``.
    """

    n_way: int
    k_shot: int
    classes: tuple[str, ...]
    support: tuple[LabeledSample, ...]
    query: tuple[LabeledSample, ...]

    def class_index(self, label: str) -> int:
        return self.classes.index(label)

    def support_for_class(self, class_index: int) -> tuple[LabeledSample, ...]:
        lo = class_index * self.k_shot
        return self.support[lo : lo + self.k_shot]

    def support_class_indices(self) -> list[int]:
        """Episode-local class index of each support sample, in support order."""
        return [i // self.k_shot for i in range(len(self.support))]


def validate_episode(e: Episode) -> str | None:
    """Check every :class:`Episode` invariant; return None when all hold.

    On failure, returns a short report naming the first violated invariant.
    Violations are the return value, never exceptions.
    """
    if e.n_way < 1:
        return f"way count: n_way must be positive, got {e.n_way}"
    if e.k_shot < 1:
        return f"shot count: k_shot must be positive, got {e.k_shot}"
    if len(e.classes) != e.n_way or len(set(e.classes)) != e.n_way:
        return (
            f"class count: expected {e.n_way} distinct support classes, "
            f"got {len(set(e.classes))} distinct of {len(e.classes)} listed"
        )
    if len(e.support) != e.n_way * e.k_shot:
        return (
            f"support size: expected {e.n_way * e.k_shot} samples, "
            f"got {len(e.support)}"
        )
    for i, sample in enumerate(e.support):
        expected = e.classes[i // e.k_shot]
        if sample.label != expected:
            return (
                f"class grouping: support sample {i} has label "
                f"{sample.label!r}, expected {expected!r}"
            )
    if not e.query:
        return "query size: query set is empty"
    for i, sample in enumerate(e.query):
        if sample.label not in e.classes:
            return f"query label: query sample {i} has label {sample.label!r} outside the support classes"
    shapes = {
        (s.descriptors.channels, s.descriptors.height, s.descriptors.width)
        for s in (*e.support, *e.query)
    }
    if len(shapes) != 1:
        return f"descriptor shape: episode mixes shapes {sorted(shapes)}"
    support_ids = {s.sample_id for s in e.support}
    for sample in e.query:
        if sample.sample_id in support_ids:
            return f"sample overlap: sample_id {sample.sample_id!r} appears in both support and query"
    return None
