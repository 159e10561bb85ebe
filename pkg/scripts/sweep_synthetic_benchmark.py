"""Benchmark calibration sweep.

Explores generator and pipeline settings for the planted-background benchmark
and prints the measurements that the acceptance suite freezes as constants:
paired filter-on/off improvement, paired neighborhood-mean on/off improvement,
background-descriptor recall of the filter, and chance-level behavior.

Run from the repository root:

    python3 scripts/sweep_synthetic_benchmark.py            # pilot sweep
    python3 scripts/sweep_synthetic_benchmark.py --confirm  # full-size confirmation
"""

from __future__ import annotations

import argparse
import dataclasses
import time

import numpy as np

from ldwr.episodes import SyntheticSpec, generate_synthetic, sample_episode
from ldwr.filtering import iterative_filter_support
from ldwr.harness import RunConfig, episode_seed, evaluate_episode, run
from ldwr.model import Episode
from ldwr.neighborhood import neighborhood_representation
from ldwr.normalization import cross_normalize, default_cn_params, l2_normalize


def paired_accuracies(ds, cfg: RunConfig) -> np.ndarray:
    rep = run(ds, cfg)
    return np.array([e.accuracy for e in rep.episodes])


def paired_diff(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Mean difference and its standard error over paired episodes."""
    d = a - b
    return float(d.mean()), float(d.std(ddof=1) / np.sqrt(len(d)))


def filter_quality(ds, masks, cfg: RunConfig) -> dict:
    """Support-filter quality against the generator's ground-truth masks.

    recall = fraction of true background descriptors removed,
    precision = fraction of kept descriptors that are foreground,
    iters = mean loop iterations.
    """
    removed_bg = 0
    total_bg = 0
    kept_fg = 0
    kept_total = 0
    iters = 0
    params = default_cn_params(ds.meta.channels) if cfg.normalize == "cn" else None
    for i in range(cfg.episode_count):
        e = sample_episode(ds, cfg.n_way, cfg.k_shot, cfg.n_query_per_class,
                           episode_seed(cfg.seed, i))
        sets = [s.descriptors for s in e.support]
        if cfg.normalize == "cn":
            sets = [cross_normalize(d, params) for d in sets]
        elif cfg.normalize == "l2":
            sets = [l2_normalize(d) for d in sets]
        vecs = [d.vectors() for d in sets]
        if cfg.nr_enabled:
            ncfg = cfg.neighborhood_config()
            nrs = [neighborhood_representation(v, ncfg) for v in vecs]
        else:
            nrs = vecs
        normalized = dataclasses.replace(
            e,
            support=tuple(
                dataclasses.replace(s, descriptors=d)
                for s, d in zip(e.support, sets)
            ),
        )
        result, _ = iterative_filter_support(normalized, nrs, cfg.filter_config())
        iters += result.iterations
        for sample, kept in zip(e.support, result.kept):
            mask = masks[sample.sample_id]
            bg = np.nonzero(~mask)[0]
            total_bg += len(bg)
            removed_bg += len(np.setdiff1d(bg, kept, assume_unique=True))
            kept_fg += int(mask[kept].sum())
            kept_total += len(kept)
    return {
        "recall": removed_bg / total_bg if total_bg else float("nan"),
        "precision": kept_fg / kept_total if kept_total else float("nan"),
        "iters": iters / cfg.episode_count,
    }


def evaluate_combo(spec: SyntheticSpec, episodes: int, seed: int, **overrides):
    ds, masks = generate_synthetic(spec)
    base = dict(
        n_way=5, k_shot=1, n_query_per_class=3, episode_count=episodes,
        seed=seed, knn_k=3,
    )
    base.update(overrides)
    t0 = time.perf_counter()
    acc_full = paired_accuracies(ds, RunConfig(**base))
    acc_nofilter = paired_accuracies(ds, RunConfig(**{**base, "filter_enabled": False}))
    acc_nonr = paired_accuracies(ds, RunConfig(**{**base, "nr_enabled": False}))
    quality = filter_quality(ds, masks, RunConfig(**base))
    dt = time.perf_counter() - t0

    fd, fse = paired_diff(acc_full, acc_nofilter)
    nd, nse = paired_diff(acc_full, acc_nonr)
    return {
        "acc_full": float(acc_full.mean()),
        "acc_nofilter": float(acc_nofilter.mean()),
        "acc_nonr": float(acc_nonr.mean()),
        "filter_diff": fd,
        "filter_se": fse,
        "nr_diff": nd,
        "nr_se": nse,
        "seconds": dt,
        **quality,
    }


def fmt(r) -> str:
    return (
        f"full={r['acc_full']:.4f} nofilt={r['acc_nofilter']:.4f} "
        f"nonr={r['acc_nonr']:.4f} | filt {r['filter_diff']:+.4f} "
        f"({r['filter_diff'] / r['filter_se'] if r['filter_se'] else float('inf'):.1f} SE) "
        f"| nr {r['nr_diff']:+.4f} ({(r['nr_diff'] / r['nr_se']) if r['nr_se'] else float('inf'):.1f} SE) "
        f"| rec {r['recall']:.3f} prec {r['precision']:.3f} it {r['iters']:.1f} "
        f"| {r['seconds']:.1f}s"
    )


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--confirm", action="store_true",
                    help="run the full-size confirmation of the chosen setting")
    ap.add_argument("--episodes", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240815)
    args = ap.parse_args()

    if args.confirm:
        spec = SyntheticSpec(
            n_classes=10, samples_per_class=10, channels=64, height=6, width=6,
            foreground_fraction=0.5, signal_to_noise=4.0, background_modes=32,
            seed=args.seed,
        )
        frozen = dict(k_shot=5, normalize="l2", nr_k=10, query_stats="support")
        r = evaluate_combo(spec, episodes=1000, seed=args.seed, **frozen)
        print(f"CONFIRM: {fmt(r)}")
        # Chance check: one fixed dataset conditions every episode, so the
        # dataset lottery (sd ~0.034 across seeds) swamps the per-episode SE
        # at 1000 episodes. Spread the 1000 episodes over 10 datasets and
        # take the SE across dataset means instead.
        means = []
        for dseed in range(10):
            chance_spec = dataclasses.replace(spec, signal_to_noise=0.0,
                                              seed=args.seed + dseed)
            ds, _ = generate_synthetic(chance_spec)
            rep = run(ds, RunConfig(n_way=5, k_shot=5, n_query_per_class=3,
                                    episode_count=100, seed=args.seed,
                                    normalize="l2", nr_k=10,
                                    query_stats="support"))
            means.append(np.mean([e.accuracy for e in rep.episodes]))
        m = np.array(means)
        se = m.std(ddof=1) / np.sqrt(len(m))
        print(f"CHANCE  mean={m.mean():.4f} se={se:.4f} "
              f"|mean-0.2|/se={abs(m.mean() - 0.2) / se:.2f}")
        return

    for channels in (64, 128):
        for modes in (16, 32):
            spec = SyntheticSpec(
                n_classes=10, samples_per_class=10, channels=channels,
                height=6, width=6, foreground_fraction=0.5,
                signal_to_noise=4.0, background_modes=modes, seed=args.seed,
            )
            for c_stop in (1.5, 2.0):
                r = evaluate_combo(
                    spec, args.episodes, args.seed,
                    k_shot=5, normalize="l2", nr_k=10,
                    query_stats="support", c_stop=c_stop,
                )
                print(
                    f"C={channels:3d} B={modes:2d} cstop={c_stop:.1f}: "
                    f"{fmt(r)}",
                    flush=True,
                )


if __name__ == "__main__":
    main()
