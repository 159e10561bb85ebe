"""Episode construction: dataset sampling and a synthetic descriptor generator.

The generator plants a known foreground/background structure so filtering can
be verified against ground-truth masks at desk scale: every class gets a unit
signal direction, every dataset a small set of shared background directions,
and each descriptor is its direction scaled by the signal level plus
isotropic unit-variance noise.  Everything is a pure function of
(spec or dataset, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .model import DescriptorSet, Episode, LabeledSample


@dataclass(frozen=True)
class DatasetMeta:
    channels: int
    height: int
    width: int
    source: str = ""


@dataclass(frozen=True)
class DescriptorDataset:
    """A class table plus labeled descriptor samples of uniform shape.

    ``classes`` fixes the dense id of each label (position in the tuple).
    """

    classes: tuple[str, ...]
    samples: tuple[LabeledSample, ...]
    meta: DatasetMeta

    def __post_init__(self):
        if len(set(self.classes)) != len(self.classes):
            raise ConfigurationError("class table contains duplicate labels")
        table = {label: i for i, label in enumerate(self.classes)}
        by_class: dict[str, list[int]] = {label: [] for label in self.classes}
        seen_ids = set()
        for i, s in enumerate(self.samples):
            if s.label not in table:
                raise ConfigurationError(
                    f"sample {s.sample_id!r} has label {s.label!r} missing from the class table"
                )
            if s.sample_id in seen_ids:
                raise ConfigurationError(f"duplicate sample_id {s.sample_id!r}")
            seen_ids.add(s.sample_id)
            d = s.descriptors
            if (d.channels, d.height, d.width) != (
                self.meta.channels,
                self.meta.height,
                self.meta.width,
            ):
                raise ConfigurationError(
                    f"sample {s.sample_id!r} shape ({d.channels}, {d.height}, "
                    f"{d.width}) differs from dataset meta"
                )
            by_class[s.label].append(i)
        object.__setattr__(self, "_class_table", table)
        object.__setattr__(self, "_by_class", {k: tuple(v) for k, v in by_class.items()})

    def class_id(self, label: str) -> int:
        return self._class_table[label]

    def sample_indices_of(self, label: str) -> tuple[int, ...]:
        return self._by_class[label]


def _rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def sample_episode(
    ds: DescriptorDataset,
    n_way: int,
    k_shot: int,
    n_query_per_class: int,
    seed,
) -> Episode:
    """Draw one N-way K-shot episode, uniformly and without replacement.

    Classes are drawn uniformly from the class table, then ``k_shot +
    n_query_per_class`` samples per class; the first ``k_shot`` become
    support, the rest query.  Deterministic for a given seed (accepts an int,
    a SeedSequence, or a Generator).
    """
    if n_way < 1 or k_shot < 1 or n_query_per_class < 1:
        raise ConfigurationError(
            f"episode sizes must be positive, got n_way={n_way} "
            f"k_shot={k_shot} n_query_per_class={n_query_per_class}"
        )
    if len(ds.classes) < n_way:
        raise ConfigurationError(
            f"dataset has {len(ds.classes)} classes, episode needs {n_way}"
        )
    need = k_shot + n_query_per_class
    rng = _rng_for(seed)
    chosen = rng.choice(len(ds.classes), size=n_way, replace=False)
    support: list[LabeledSample] = []
    query: list[LabeledSample] = []
    classes = []
    for ci in chosen:
        label = ds.classes[int(ci)]
        classes.append(label)
        pool = ds.sample_indices_of(label)
        if len(pool) < need:
            raise ConfigurationError(
                f"class {label!r} has {len(pool)} samples, episode needs {need}"
            )
        picks = rng.choice(len(pool), size=need, replace=False)
        chosen_samples = [ds.samples[pool[int(p)]] for p in picks]
        support.extend(chosen_samples[:k_shot])
        query.extend(chosen_samples[k_shot:])
    return Episode(
        n_way=n_way,
        k_shot=k_shot,
        classes=tuple(classes),
        support=tuple(support),
        query=tuple(query),
    )


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape and noise model of a generated descriptor dataset.

    ``signal_to_noise`` scales both planted directions against the
    unit-variance isotropic noise: foreground positions carry the class
    direction, background positions the sample's background direction, drawn
    per sample from ``background_modes`` directions shared across the whole
    dataset.  Background content thus repeats across images at the same
    salience as class content, independent of class.
    """

    n_classes: int = 10
    samples_per_class: int = 20
    channels: int = 32
    height: int = 6
    width: int = 6
    foreground_fraction: float = 0.5
    signal_to_noise: float = 4.0
    background_modes: int = 8
    seed: int = 0

    def __post_init__(self):
        if min(self.n_classes, self.samples_per_class, self.channels, self.height, self.width) < 1:
            raise ConfigurationError("all synthetic sizes must be positive")
        if not 0.0 < self.foreground_fraction <= 1.0:
            raise ConfigurationError(
                f"foreground_fraction must be in (0, 1], got {self.foreground_fraction}"
            )
        if self.signal_to_noise < 0.0:
            raise ConfigurationError(
                f"signal_to_noise must be nonnegative, got {self.signal_to_noise}"
            )
        if self.background_modes < 1:
            raise ConfigurationError(
                f"background_modes must be positive, got {self.background_modes}"
            )


def _unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def generate_synthetic(
    spec: SyntheticSpec,
) -> tuple[DescriptorDataset, dict[str, np.ndarray]]:
    """Build the planted-structure dataset plus per-sample foreground masks.

    Masks align index-for-index with descriptor columns (True = the position
    carries the class signal).  Descriptor values are stored as float32 so a
    disk round trip through the binary format is exact.
    """
    rng = _rng_for(spec.seed)
    n = spec.height * spec.width
    n_fg = int(np.floor(spec.foreground_fraction * n + 0.5))
    class_dirs = _unit_directions(rng, spec.n_classes, spec.channels)
    bg_dirs = _unit_directions(rng, spec.background_modes, spec.channels)

    labels = [f"class{ci:03d}" for ci in range(spec.n_classes)]
    samples = []
    masks: dict[str, np.ndarray] = {}
    for ci, label in enumerate(labels):
        for si in range(spec.samples_per_class):
            fg_positions = rng.choice(n, size=n_fg, replace=False)
            mode = int(rng.integers(0, spec.background_modes))
            noise = rng.standard_normal((n, spec.channels))
            mask = np.zeros(n, dtype=bool)
            mask[fg_positions] = True
            data = noise
            data[mask] += spec.signal_to_noise * class_dirs[ci]
            data[~mask] += spec.signal_to_noise * bg_dirs[mode]
            sample_id = f"{label}/{si:04d}"
            samples.append(
                LabeledSample(
                    descriptors=DescriptorSet(
                        spec.channels,
                        spec.height,
                        spec.width,
                        data.T.astype(np.float32),
                    ),
                    label=label,
                    sample_id=sample_id,
                )
            )
            mask.flags.writeable = False
            masks[sample_id] = mask
    ds = DescriptorDataset(
        classes=tuple(labels),
        samples=tuple(samples),
        meta=DatasetMeta(
            spec.channels, spec.height, spec.width, source=f"synthetic(seed={spec.seed})"
        ),
    )
    return ds, masks


def load_synthetic_spec(path: str | Path) -> SyntheticSpec:
    """Read a spec file: a JSON key-value document of SyntheticSpec fields."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot load synthetic spec from {path}: {e}") from e
    known = set(SyntheticSpec.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ConfigurationError(f"unknown synthetic spec fields: {sorted(unknown)}")
    return SyntheticSpec(**doc)


def save_synthetic_spec(spec: SyntheticSpec, path: str | Path) -> None:
    doc = {name: getattr(spec, name) for name in SyntheticSpec.__dataclass_fields__}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
