"""Descriptor normalization: fused spatial/channel standardization plus the
plain per-descriptor L2 baseline.

The fused ("cross") normalization standardizes each spatial position over its
channel values, separately standardizes each channel over its spatial values,
and mixes the two results with positive weights normalized to sum to one.
The spatial branch is gated by two scalar affine maps of the per-position
mean field (1x1 single-channel convolutions, in effect).

All statistics are population statistics (divide by count).  Outputs are
computed in float64 and preserve the input's C, H, W.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .model import DescriptorSet


@dataclass(frozen=True)
class CrossNormParams:
    """Parameters of the fused normalization.

    ``(a1, b1)`` and ``(a2, b2)`` are the scalar affine maps applied to the
    per-position mean field (scale and shift gates of the spatial branch);
    ``gamma``/``beta`` are the per-channel affine of the channel branch;
    ``omega1``/``omega2`` weight the fusion.  Defaults are the untrained,
    identity-like configuration: the output is then the plain average of the
    two standardizations.
    """

    gamma: np.ndarray
    beta: np.ndarray
    a1: float = 0.0
    b1: float = 1.0
    a2: float = 0.0
    b2: float = 0.0
    omega1: float = 1.0
    omega2: float = 1.0
    epsilon: float = 1e-5

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        if gamma.ndim != 1 or beta.shape != gamma.shape:
            raise ConfigurationError(
                f"gamma and beta must be 1-D and equal-length, got shapes "
                f"{gamma.shape} and {beta.shape}"
            )
        if not (self.omega1 > 0.0 and self.omega2 > 0.0):
            raise ConfigurationError(
                f"fusion weights must be strictly positive, got "
                f"omega1={self.omega1} omega2={self.omega2}"
            )
        if not self.epsilon > 0.0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        for g in (gamma, beta):
            g.flags.writeable = False
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)

    @property
    def channels(self) -> int:
        return self.gamma.shape[0]


def default_cn_params(channels: int, epsilon: float = 1e-5) -> CrossNormParams:
    """Untrained defaults: gamma=1, beta=0, equal fusion weights."""
    return CrossNormParams(
        gamma=np.ones(channels), beta=np.zeros(channels), epsilon=epsilon
    )


def _check_channels(d: DescriptorSet, p: CrossNormParams) -> None:
    if p.channels != d.channels:
        raise ConfigurationError(
            f"params are sized for {p.channels} channels, data has {d.channels}"
        )


def spatial_normalize(d: DescriptorSet, p: CrossNormParams) -> DescriptorSet:
    """Standardize each position over its channel values, gated by its mean.

    For position n with channel mean mu_n and population variance var_n, the
    output column is ``z_n * (a1*mu_n + b1) + (a2*mu_n + b2)`` where
    ``z_n = (x_n - mu_n) / sqrt(var_n + epsilon)``.
    """
    _check_channels(d, p)
    x = np.asarray(d.data, dtype=np.float64)
    mu = x.mean(axis=0)
    var = x.var(axis=0)
    z = (x - mu) / np.sqrt(var + p.epsilon)
    out = z * (p.a1 * mu + p.b1) + (p.a2 * mu + p.b2)
    return d.with_data(out)


def channel_normalize(d: DescriptorSet, p: CrossNormParams) -> DescriptorSet:
    """Standardize each channel over its N spatial values, then apply the
    per-channel affine ``gamma * z + beta``."""
    _check_channels(d, p)
    x = np.asarray(d.data, dtype=np.float64)
    mu = x.mean(axis=1, keepdims=True)
    var = x.var(axis=1, keepdims=True)
    z = (x - mu) / np.sqrt(var + p.epsilon)
    out = p.gamma[:, None] * z + p.beta[:, None]
    return d.with_data(out)


def cross_normalize(d: DescriptorSet, p: CrossNormParams) -> DescriptorSet:
    """Convex combination of the two standardizations.

    The mixing coefficients are ``omega1/(omega1+omega2)`` and its complement
    to one, computed so they sum to exactly 1.0.
    """
    xs = spatial_normalize(d, p).data
    xc = channel_normalize(d, p).data
    w1 = p.omega1 / (p.omega1 + p.omega2)
    w2 = 1.0 - w1
    return d.with_data(xs * w1 + xc * w2)


def l2_normalize(d: DescriptorSet) -> DescriptorSet:
    """Divide each descriptor column by its Euclidean norm.

    Zero columns pass through unchanged: synthetic data may contain zero
    padding, and downstream cosine scoring treats such descriptors as
    uninformative anyway.
    """
    x = np.asarray(d.data, dtype=np.float64)
    norms = np.linalg.norm(x, axis=0)
    safe = np.where(norms > 0.0, norms, 1.0)
    return d.with_data(x / safe)


_SCALAR_FIELDS = ("a1", "b1", "a2", "b2", "omega1", "omega2", "epsilon")


def save_cn_params(p: CrossNormParams, path: str | Path) -> None:
    """Write the parameter file consumed by ``--cn-params`` (JSON key-value)."""
    doc = {name: float(getattr(p, name)) for name in _SCALAR_FIELDS}
    doc["gamma"] = [float(v) for v in p.gamma]
    doc["beta"] = [float(v) for v in p.beta]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_cn_params(path: str | Path) -> CrossNormParams:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot load normalization params from {path}: {e}") from e
    try:
        scalars = {name: float(doc[name]) for name in _SCALAR_FIELDS}
        gamma = np.asarray(doc["gamma"], dtype=np.float64)
        beta = np.asarray(doc["beta"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"malformed normalization params in {path}: {e}") from e
    return CrossNormParams(gamma=gamma, beta=beta, **scalars)
