"""Shared builders for randomized and constructed test data."""

from __future__ import annotations

import numpy as np
import pytest

from ldwr.model import DescriptorSet, Episode, LabeledSample


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_descriptor_set(
    rng: np.random.Generator, channels: int, height: int, width: int
) -> DescriptorSet:
    data = rng.standard_normal((channels, height * width))
    return DescriptorSet(channels=channels, height=height, width=width, data=data)


def columns_of(d: DescriptorSet) -> list[list[float]]:
    """Descriptor columns as plain Python lists, oracle-ready."""
    return [[float(x) for x in col] for col in np.asarray(d.data).T]


def rows_to_lists(a: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(a)]


def build_episode(
    rng: np.random.Generator,
    n_way: int,
    k_shot: int,
    n_query: int,
    channels: int,
    height: int,
    width: int,
    class_shift: float = 0.0,
) -> Episode:
    """Random episode; class_shift > 0 plants a per-class mean offset so
    classes are actually separable."""
    classes = tuple(f"cls{c}" for c in range(n_way))
    directions = rng.standard_normal((n_way, channels))
    support, query = [], []
    for ci, label in enumerate(classes):
        for si in range(k_shot):
            d = rng.standard_normal((channels, height * width))
            d += class_shift * directions[ci][:, None]
            support.append(
                LabeledSample(
                    descriptors=DescriptorSet(channels, height, width, d),
                    label=label,
                    sample_id=f"{label}/s{si}",
                )
            )
    for ci, label in enumerate(classes):
        for qi in range(n_query):
            d = rng.standard_normal((channels, height * width))
            d += class_shift * directions[ci][:, None]
            query.append(
                LabeledSample(
                    descriptors=DescriptorSet(channels, height, width, d),
                    label=label,
                    sample_id=f"{label}/q{qi}",
                )
            )
    return Episode(
        n_way=n_way,
        k_shot=k_shot,
        classes=classes,
        support=tuple(support),
        query=tuple(query),
    )


def dyadic_vectors(
    rng: np.random.Generator, count: int, channels: int = 8, ones: int = 4
) -> np.ndarray:
    """(count, channels) rows of 0/1 floats with exactly ``ones`` ones.

    Every row has Euclidean norm sqrt(ones); with ones = 4 that is exactly
    2.0, so cosines are dyadic rationals and float sums of them are exact in
    any order.
    """
    out = np.zeros((count, channels), dtype=np.float64)
    for i in range(count):
        idx = rng.choice(channels, size=ones, replace=False)
        out[i, idx] = 1.0
    return out


def dyadic_descriptor_set(
    rng: np.random.Generator, height: int, width: int, channels: int = 8
) -> DescriptorSet:
    vecs = dyadic_vectors(rng, height * width, channels)
    return DescriptorSet(channels, height, width, vecs.T.copy())


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240817)
