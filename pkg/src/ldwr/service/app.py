"""FastAPI application: evaluation runs, dataset generation, file inspection."""

from __future__ import annotations

from collections import Counter

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..dataset_io import read_dataset, write_dataset
from ..episodes import DescriptorDataset, SyntheticSpec, generate_synthetic
from ..errors import LdwrError
from ..harness import RunConfig, report_to_canonical_dict, run
from ..normalization import load_cn_params
from .schemas import (
    EvalRequest,
    EvalResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    InspectRequest,
    InspectResponse,
    SyntheticSpecModel,
)


def _spec_from_model(model: SyntheticSpecModel) -> SyntheticSpec:
    return SyntheticSpec(**model.model_dump())


def _dataset_for(req: EvalRequest) -> DescriptorDataset:
    if req.data_path is not None:
        return read_dataset(req.data_path)
    ds, _ = generate_synthetic(_spec_from_model(req.synthetic))
    return ds


def _run_config(req: EvalRequest) -> RunConfig:
    cn_params = None
    if req.cn_params_path is not None:
        cn_params = load_cn_params(req.cn_params_path)
    return RunConfig(
        n_way=req.n_way,
        k_shot=req.k_shot,
        n_query_per_class=req.n_query_per_class,
        episode_count=req.episodes,
        seed=req.seed,
        normalize=req.normalize,
        cn_params=cn_params,
        nr_enabled=req.nr_enabled,
        nr_k=req.nr_k,
        nr_include_self=req.nr_include_self,
        filter_enabled=req.filter_enabled,
        c_stop=req.c_stop,
        max_filter_iterations=req.max_filter_iterations,
        min_keep_fraction=req.min_keep_fraction,
        filter_mode=req.filter_mode,
        query_stats=req.query_stats,
        knn_k=req.knn_k,
        workers=req.workers,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="ldwr", version=__version__)

    @app.exception_handler(LdwrError)
    async def _domain_error(_: Request, exc: LdwrError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/eval", response_model=EvalResponse)
    async def evaluate(req: EvalRequest) -> EvalResponse:
        ds = _dataset_for(req)
        report = run(ds, _run_config(req))
        return EvalResponse(
            report=report_to_canonical_dict(report),
            wall_time_s=report.wall_time_s,
        )

    @app.post("/datasets/synthetic", response_model=GenerateResponse)
    async def generate(req: GenerateRequest) -> GenerateResponse:
        ds, _ = generate_synthetic(_spec_from_model(req.spec))
        write_dataset(ds, req.out_path)
        return GenerateResponse(
            out_path=req.out_path,
            classes=len(ds.classes),
            samples=len(ds.samples),
            channels=ds.meta.channels,
            height=ds.meta.height,
            width=ds.meta.width,
        )

    @app.post("/datasets/inspect", response_model=InspectResponse)
    async def inspect(req: InspectRequest) -> InspectResponse:
        ds = read_dataset(req.path)
        counts = Counter(s.label for s in ds.samples)
        return InspectResponse(
            classes=list(ds.classes),
            samples=len(ds.samples),
            channels=ds.meta.channels,
            height=ds.meta.height,
            width=ds.meta.width,
            samples_per_class={c: counts.get(c, 0) for c in ds.classes},
        )

    return app
