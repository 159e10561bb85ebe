"""Iteration-0 weight separation probe.

Measures, right before the first filtering pass, how well the class-averaged
descriptor weights separate planted foreground from background: group means,
the d' statistic, and the fraction of each group below the mu - sigma
threshold.  Separation at iteration 0 is what decides whether the first pass
removes background rather than noise, so this is the quantity to maximize
before freezing benchmark parameters.

    python3 scripts/weight_separation_probe.py
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ldwr.episodes import SyntheticSpec, generate_synthetic, sample_episode
from ldwr.filtering import aggregate_weights, descriptor_weights
from ldwr.harness import RunConfig, episode_seed
from ldwr.neighborhood import neighborhood_representation
from ldwr.normalization import cross_normalize, default_cn_params, l2_normalize
from ldwr.prototypes import all_prototypes


def probe(spec: SyntheticSpec, cfg: RunConfig, episodes: int = 20) -> dict:
    ds, masks = generate_synthetic(spec)
    params = default_cn_params(spec.channels)
    fgw: list[float] = []
    bgw: list[float] = []
    for i in range(episodes):
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
        ep = dataclasses.replace(
            e,
            support=tuple(
                dataclasses.replace(s, descriptors=d)
                for s, d in zip(e.support, sets)
            ),
        )
        n = spec.height * spec.width
        protos = all_prototypes(ep, [np.arange(n) for _ in range(len(e.support))])
        for s, nr in zip(e.support, nrs):
            w = aggregate_weights(descriptor_weights(nr, protos))
            m = masks[s.sample_id]
            fgw.extend(w[m])
            bgw.extend(w[~m])
    fg = np.array(fgw)
    bg = np.array(bgw)
    both = np.concatenate([fg, bg])
    thr = both.mean() - both.std()
    dprime = (fg.mean() - bg.mean()) / np.sqrt((fg.var() + bg.var()) / 2.0)
    return {
        "fg": f"{fg.mean():+.4f}±{fg.std():.4f}",
        "bg": f"{bg.mean():+.4f}±{bg.std():.4f}",
        "dprime": dprime,
        "fg_cut": float((fg < thr).mean()),
        "bg_cut": float((bg < thr).mean()),
    }


def main() -> None:
    for normalize in ("cn", "l2"):
        for channels in (32, 64):
            for modes in (8, 16, 32):
                for nr_k in (5, 10):
                    spec = SyntheticSpec(
                        n_classes=10, samples_per_class=10, channels=channels,
                        height=6, width=6, foreground_fraction=0.5,
                        signal_to_noise=4.0, background_modes=modes,
                        seed=20240815,
                    )
                    cfg = RunConfig(
                        n_way=5, k_shot=5, n_query_per_class=3,
                        episode_count=20, seed=20240815,
                        normalize=normalize, nr_k=nr_k,
                    )
                    r = probe(spec, cfg)
                    print(
                        f"{normalize:3s} C={channels} B={modes:2d} "
                        f"nrk={nr_k:2d}: fg {r['fg']} bg {r['bg']} "
                        f"d'={r['dprime']:5.2f} cut fg {r['fg_cut']:.3f} "
                        f"bg {r['bg_cut']:.3f}",
                        flush=True,
                    )


if __name__ == "__main__":
    main()
