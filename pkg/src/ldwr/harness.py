"""Episodic evaluation: run many episodes, report mean accuracy with a 95% CI.

Pipeline per episode: normalize descriptors (fused / L2 / none), build
per-image neighborhood means (optional), iteratively filter the support set,
filter the query set against the final prototypes, then classify every query
by the filtered image-to-class measure.  Every ablation is a config toggle so
paired-seed comparisons run on identical episode streams.

Episodes are evaluated independently (one derived seed each), so serial and
worker-pool execution produce identical reports; results merge by episode
index.  The canonical report file is timing-free and byte-stable: wall time
is carried in memory and in service responses, never in the written bytes.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import classifier as clf
from . import filtering as flt
from . import neighborhood as nbr
from . import normalization as nrm
from .episodes import DescriptorDataset, sample_episode
from .errors import ConfigurationError, EpisodeEvaluationError, LdwrError
from .model import DescriptorSet, Episode

REPORT_FORMAT = "ldwr.report/v1"
NORMALIZE_MODES = ("cn", "l2", "none")
QUERY_STATS_MODES = ("own", "support")


@dataclass(frozen=True)
class RunConfig:
    """Everything that defines a run: episode spec plus pipeline toggles."""

    n_way: int = 5
    k_shot: int = 1
    n_query_per_class: int = 15
    episode_count: int = 600
    seed: int = 42

    normalize: str = "cn"
    cn_params: nrm.CrossNormParams | None = None

    nr_enabled: bool = True
    nr_k: int = 10
    nr_include_self: bool = False

    filter_enabled: bool = True
    c_stop: float = 2.0
    max_filter_iterations: int = 10
    min_keep_fraction: float = 0.1
    filter_mode: str = "averaged"
    query_stats: str = "own"

    knn_k: int = 3
    workers: int = 1

    def __post_init__(self):
        if self.episode_count < 1:
            raise ConfigurationError(
                f"episode_count must be positive, got {self.episode_count}"
            )
        if self.normalize not in NORMALIZE_MODES:
            raise ConfigurationError(
                f"normalize must be one of {NORMALIZE_MODES}, got {self.normalize!r}"
            )
        if self.query_stats not in QUERY_STATS_MODES:
            raise ConfigurationError(
                f"query_stats must be one of {QUERY_STATS_MODES}, got {self.query_stats!r}"
            )
        if self.workers < 1:
            raise ConfigurationError(f"workers must be positive, got {self.workers}")
        # Fail fast on bad sub-config values.
        self.filter_config()
        self.neighborhood_config()
        self.classifier_config()

    def neighborhood_config(self) -> nbr.NeighborhoodConfig:
        return nbr.NeighborhoodConfig(self.nr_k, self.nr_include_self)

    def filter_config(self) -> flt.FilterConfig:
        return flt.FilterConfig(
            c_stop=self.c_stop,
            max_iterations=self.max_filter_iterations,
            min_keep_fraction=self.min_keep_fraction,
            mode=self.filter_mode,
        )

    def classifier_config(self) -> clf.ClassifierConfig:
        return clf.ClassifierConfig(self.knn_k)

    def echo(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        for name in self.__dataclass_fields__:
            if name == "workers":
                # Execution detail: results are worker-count independent, so
                # the canonical report must not vary with it.
                continue
            value = getattr(self, name)
            if isinstance(value, nrm.CrossNormParams):
                value = {
                    "a1": value.a1, "b1": value.b1,
                    "a2": value.a2, "b2": value.b2,
                    "gamma": [float(v) for v in value.gamma],
                    "beta": [float(v) for v in value.beta],
                    "omega1": value.omega1, "omega2": value.omega2,
                    "epsilon": value.epsilon,
                }
            doc[name] = value
        return doc


@dataclass(frozen=True)
class EpisodeReport:
    """Per-episode outcome: predictions, probabilities, and filter diagnostics."""

    index: int
    accuracy: float
    predicted: tuple[int, ...]
    true_classes: tuple[int, ...]
    probabilities: tuple[tuple[float, ...], ...]
    filter_diagnostics: dict[str, Any] | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "accuracy": self.accuracy,
            "predicted": list(self.predicted),
            "true_classes": list(self.true_classes),
            "probabilities": [list(row) for row in self.probabilities],
            "filter": self.filter_diagnostics,
        }


@dataclass(frozen=True)
class RunReport:
    config: dict[str, Any]
    dataset: dict[str, Any]
    episode_count: int
    mean_accuracy: float
    ci95_half_width: float
    episodes: tuple[EpisodeReport, ...]
    wall_time_s: float

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        doc = {
            "report_format": REPORT_FORMAT,
            "config": self.config,
            "dataset": self.dataset,
            "episode_count": self.episode_count,
            "mean_accuracy": self.mean_accuracy,
            "ci95_half_width": self.ci95_half_width,
            "episodes": [e.to_dict() for e in self.episodes],
        }
        if include_timing:
            doc["wall_time_s"] = self.wall_time_s
        return doc


def _normalize_sets(
    sets: list[DescriptorSet], cfg: RunConfig, params: nrm.CrossNormParams | None
) -> list[DescriptorSet]:
    if cfg.normalize == "cn":
        return [nrm.cross_normalize(d, params) for d in sets]
    if cfg.normalize == "l2":
        return [nrm.l2_normalize(d) for d in sets]
    return sets


def evaluate_episode(
    episode: Episode,
    cfg: RunConfig,
    cn_params: nrm.CrossNormParams | None = None,
    index: int = 0,
) -> EpisodeReport:
    """Run the full pipeline on one episode."""
    params = cn_params if cn_params is not None else cfg.cn_params
    if cfg.normalize == "cn" and params is None:
        params = nrm.default_cn_params(episode.support[0].descriptors.channels)

    sup_sets = _normalize_sets([s.descriptors for s in episode.support], cfg, params)
    qry_sets = _normalize_sets([s.descriptors for s in episode.query], cfg, params)
    sup_vecs = [d.vectors() for d in sup_sets]
    qry_vecs = [d.vectors() for d in qry_sets]

    if cfg.nr_enabled:
        ncfg = cfg.neighborhood_config()
        sup_nr = [nbr.neighborhood_representation(v, ncfg) for v in sup_vecs]
        qry_nr = [nbr.neighborhood_representation(v, ncfg) for v in qry_vecs]
    else:
        sup_nr = sup_vecs
        qry_nr = qry_vecs

    diagnostics = None
    if cfg.filter_enabled:
        fcfg = cfg.filter_config()
        normalized = replace(
            episode,
            support=tuple(
                replace(s, descriptors=d) for s, d in zip(episode.support, sup_sets)
            ),
        )
        sup_result, protos = flt.iterative_filter_support(normalized, sup_nr, fcfg)
        stats = (
            (sup_result.mu_bar, sup_result.sigma_bar)
            if cfg.query_stats == "support"
            else None
        )
        qry_result = flt.filter_query(qry_nr, protos, fcfg, stats=stats)
        sup_kept = sup_result.kept
        qry_kept = qry_result.kept
        diagnostics = {
            "iterations": sup_result.iterations,
            "support": {
                "mu_bar": sup_result.mu_bar,
                "sigma_bar": sup_result.sigma_bar,
                "sigma_bar_0": sup_result.sigma_bar_0,
                "kept_fraction": sup_result.kept_fraction([len(v) for v in sup_vecs]),
                "kept_counts_history": [
                    list(row) for row in sup_result.kept_counts_history
                ],
            },
            "query": {
                "mu_bar": qry_result.mu_bar,
                "sigma_bar": qry_result.sigma_bar,
                "kept_fraction": qry_result.kept_fraction([len(v) for v in qry_vecs]),
            },
        }
    else:
        sup_kept = tuple(np.arange(len(v), dtype=np.intp) for v in sup_vecs)
        qry_kept = tuple(np.arange(len(v), dtype=np.intp) for v in qry_vecs)

    class_of_sample = episode.support_class_indices()
    pools: list[list[np.ndarray]] = [[] for _ in range(episode.n_way)]
    for v, k, c in zip(sup_nr, sup_kept, class_of_sample):
        pools[c].append(v[k])
    class_pools = [np.concatenate(p) for p in pools]

    ccfg = cfg.classifier_config()
    predicted, trues, probabilities = [], [], []
    hits = 0
    for qi, sample in enumerate(episode.query):
        scores = clf.classify(qry_nr[qi][qry_kept[qi]], class_pools, ccfg)
        true_class = episode.class_index(sample.label)
        predicted.append(scores.predicted)
        trues.append(true_class)
        probabilities.append(tuple(float(p) for p in scores.probabilities))
        hits += int(scores.predicted == true_class)

    return EpisodeReport(
        index=index,
        accuracy=hits / len(episode.query),
        predicted=tuple(predicted),
        true_classes=tuple(trues),
        probabilities=tuple(probabilities),
        filter_diagnostics=diagnostics,
    )


def episode_seed(run_seed: int, index: int) -> np.random.SeedSequence:
    """Independent, order-free per-episode seed derived from the run seed."""
    return np.random.SeedSequence(entropy=run_seed, spawn_key=(index,))


def run(ds: DescriptorDataset, cfg: RunConfig) -> RunReport:
    """Evaluate ``cfg.episode_count`` episodes sampled from ``ds``."""
    t0 = time.perf_counter()
    params = cfg.cn_params
    if cfg.normalize == "cn":
        if params is None:
            params = nrm.default_cn_params(ds.meta.channels)
        elif params.channels != ds.meta.channels:
            raise ConfigurationError(
                f"normalization params are sized for {params.channels} channels, "
                f"dataset has {ds.meta.channels}"
            )

    def one(i: int) -> EpisodeReport:
        try:
            episode = sample_episode(
                ds, cfg.n_way, cfg.k_shot, cfg.n_query_per_class, episode_seed(cfg.seed, i)
            )
            return evaluate_episode(episode, cfg, params, index=i)
        except LdwrError as e:
            raise EpisodeEvaluationError(i, e) from e

    indices = range(cfg.episode_count)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            episodes = list(pool.map(one, indices))
    else:
        episodes = [one(i) for i in indices]

    accs = np.array([e.accuracy for e in episodes], dtype=np.float64)
    mean = float(accs.mean())
    half = (
        float(1.96 * accs.std(ddof=1) / np.sqrt(len(accs))) if len(accs) >= 2 else 0.0
    )
    return RunReport(
        config=cfg.echo(),
        dataset={
            "source": ds.meta.source,
            "classes": len(ds.classes),
            "samples": len(ds.samples),
            "channels": ds.meta.channels,
            "height": ds.meta.height,
            "width": ds.meta.width,
        },
        episode_count=cfg.episode_count,
        mean_accuracy=mean,
        ci95_half_width=half,
        episodes=tuple(episodes),
        wall_time_s=time.perf_counter() - t0,
    )


def report_to_canonical_dict(report: RunReport | dict[str, Any]) -> dict[str, Any]:
    """The byte-stable report content: everything except wall-clock timing."""
    if isinstance(report, RunReport):
        return report.to_dict(include_timing=False)
    doc = dict(report)
    doc.pop("wall_time_s", None)
    return doc


def report_write(report: RunReport | dict[str, Any], path: str | Path) -> None:
    """Write the canonical UTF-8 report; identical runs produce identical bytes."""
    doc = report_to_canonical_dict(report)
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot write report to {path}: {e}") from e


def read_report(path: str | Path) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read report from {path}: {e}") from e
