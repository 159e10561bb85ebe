"""Request and response bodies for the evaluation service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator


class SyntheticSpecModel(BaseModel):
    """Mirror of the synthetic dataset spec, JSON-friendly."""

    model_config = {"extra": "forbid"}

    n_classes: int = 10
    samples_per_class: int = 20
    channels: int = 32
    height: int = 6
    width: int = 6
    foreground_fraction: float = 0.5
    signal_to_noise: float = 4.0
    background_modes: int = 8
    seed: int = 0


class EvalRequest(BaseModel):
    """One evaluation run.  Exactly one of data_path / synthetic selects the data."""

    model_config = {"extra": "forbid"}

    data_path: str | None = None
    synthetic: SyntheticSpecModel | None = None

    n_way: int = 5
    k_shot: int = 1
    n_query_per_class: int = 15
    episodes: int = Field(default=600, ge=1)
    seed: int = 42

    normalize: Literal["cn", "l2", "none"] = "cn"
    cn_params_path: str | None = None

    nr_enabled: bool = True
    nr_k: int = 10
    nr_include_self: bool = False

    filter_enabled: bool = True
    c_stop: float = 2.0
    max_filter_iterations: int = 10
    min_keep_fraction: float = 0.1
    filter_mode: Literal["averaged", "per_class"] = "averaged"
    query_stats: Literal["own", "support"] = "own"

    knn_k: int = 3
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _one_source(self) -> "EvalRequest":
        if (self.data_path is None) == (self.synthetic is None):
            raise ValueError("provide exactly one of data_path or synthetic")
        return self


class EvalResponse(BaseModel):
    """Canonical report plus wall time (timing never enters the written report)."""

    report: dict[str, Any]
    wall_time_s: float


class GenerateRequest(BaseModel):
    model_config = {"extra": "forbid"}

    spec: SyntheticSpecModel = SyntheticSpecModel()
    out_path: str


class GenerateResponse(BaseModel):
    out_path: str
    classes: int
    samples: int
    channels: int
    height: int
    width: int


class InspectRequest(BaseModel):
    model_config = {"extra": "forbid"}

    path: str


class InspectResponse(BaseModel):
    classes: list[str]
    samples: int
    channels: int
    height: int
    width: int
    samples_per_class: dict[str, int]


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str
