"""Command line client.

Every command talks to the HTTP service: either a remote instance given with
``--server`` or an in-process instance of the same app (no socket, same code
path).  The report file is written client-side so the service stays
filesystem-free for evaluation runs.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path
from typing import Any

import click
import httpx

from .harness import report_write
from .service.app import create_app

_SPEC_KEYS_INT = {
    "n_classes", "samples_per_class", "channels", "height", "width",
    "background_modes", "seed",
}
_SPEC_KEYS_FLOAT = {"foreground_fraction", "signal_to_noise"}


def _spec_pairs(pairs: list[str], source: str) -> dict[str, Any]:
    spec: dict[str, Any] = {}
    for part in pairs:
        if "=" not in part:
            raise click.ClickException(
                f"bad synthetic spec fragment {part!r} in {source}; expected key=value"
            )
        key, _, raw = part.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            if key in _SPEC_KEYS_INT:
                spec[key] = int(raw)
            elif key in _SPEC_KEYS_FLOAT:
                spec[key] = float(raw)
            else:
                raise click.ClickException(f"unknown synthetic spec key {key!r}")
        except ValueError:
            raise click.ClickException(f"bad value {raw!r} for synthetic spec key {key!r}")
    return spec


def _parse_synthetic_spec(text: str) -> dict[str, Any]:
    """SPEC is a spec file path or inline ``key=value,key=value`` overrides.

    A spec file holds either a JSON object or ``key = value`` lines
    (``#`` comments allowed).  An empty string or the word ``default``
    selects the default spec.
    """
    if text in ("", "default"):
        return {}
    path = Path(text)
    if path.is_file():
        try:
            content = path.read_text(encoding="utf-8")
        except OSError as e:
            raise click.ClickException(f"cannot read synthetic spec {text}: {e}")
        try:
            doc = json.loads(content)
        except json.JSONDecodeError:
            lines = [
                line.partition("#")[0].strip()
                for line in content.splitlines()
            ]
            return _spec_pairs([line for line in lines if line], text)
        if not isinstance(doc, dict):
            raise click.ClickException(f"synthetic spec {text} must be a JSON object")
        return doc
    return _spec_pairs(text.split(","), "the --synthetic value")


def _request(server: str | None, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            resp = client.post(path, json=payload)
    else:
        async def _go() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://service", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        resp = asyncio.run(_go())
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


@click.group()
def main() -> None:
    """Few-shot descriptor evaluation tools."""


@main.command("eval")
@click.option("--data", "data_path", type=click.Path(), default=None,
              help="Binary descriptor dataset file.")
@click.option("--synthetic", "synthetic", default=None,
              help="Synthetic data: JSON spec file, key=value list, or 'default'.")
@click.option("--n-way", default=5, show_default=True)
@click.option("--k-shot", default=1, show_default=True)
@click.option("--n-query", default=15, show_default=True,
              help="Queries per class.")
@click.option("--episodes", default=600, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--normalize", type=click.Choice(["cn", "l2", "none"]),
              default="cn", show_default=True)
@click.option("--cn-params", "cn_params", type=click.Path(), default=None,
              help="JSON file with trained normalization parameters.")
@click.option("--no-nr", "nr_enabled", flag_value=False, default=True,
              help="Classify raw descriptors instead of neighborhood means.")
@click.option("--nr-k", default=10, show_default=True,
              help="Neighbors per descriptor for the neighborhood mean.")
@click.option("--no-filter", "filter_enabled", flag_value=False, default=True,
              help="Skip descriptor filtering.")
@click.option("--c-stop", default=2.0, show_default=True,
              help="Stop filtering once the weight spread shrinks by this factor.")
@click.option("--max-filter-iterations", default=10, show_default=True)
@click.option("--min-keep-fraction", default=0.1, show_default=True)
@click.option("--filter-mode", type=click.Choice(["averaged", "per_class"]),
              default="averaged", show_default=True)
@click.option("--query-stats", type=click.Choice(["own", "support"]),
              default="own", show_default=True,
              help="Threshold queries with their own statistics or the support's.")
@click.option("--knn-k", default=3, show_default=True,
              help="Nearest descriptors per class pool in the classifier.")
@click.option("--workers", default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Where to write the report JSON.")
@click.option("--server", default=None, help="Base URL of a running service.")
def eval_cmd(
    data_path: str | None,
    synthetic: str | None,
    n_way: int,
    k_shot: int,
    n_query: int,
    episodes: int,
    seed: int,
    normalize: str,
    cn_params: str | None,
    nr_enabled: bool,
    nr_k: int,
    filter_enabled: bool,
    c_stop: float,
    max_filter_iterations: int,
    min_keep_fraction: float,
    filter_mode: str,
    query_stats: str,
    knn_k: int,
    workers: int,
    out_path: str,
    server: str | None,
) -> None:
    """Run episodic evaluation and write a report."""
    if (data_path is None) == (synthetic is None):
        raise click.ClickException("provide exactly one of --data or --synthetic")
    payload: dict[str, Any] = {
        "n_way": n_way,
        "k_shot": k_shot,
        "n_query_per_class": n_query,
        "episodes": episodes,
        "seed": seed,
        "normalize": normalize,
        "cn_params_path": cn_params,
        "nr_enabled": nr_enabled,
        "nr_k": nr_k,
        "filter_enabled": filter_enabled,
        "c_stop": c_stop,
        "max_filter_iterations": max_filter_iterations,
        "min_keep_fraction": min_keep_fraction,
        "filter_mode": filter_mode,
        "query_stats": query_stats,
        "knn_k": knn_k,
        "workers": workers,
    }
    if data_path is not None:
        payload["data_path"] = data_path
    else:
        payload["synthetic"] = _parse_synthetic_spec(synthetic)
    doc = _request(server, "/eval", payload)
    report = doc["report"]
    report_write(report, out_path)
    mean = 100.0 * report["mean_accuracy"]
    half = 100.0 * report["ci95_half_width"]
    click.echo(f"accuracy: {mean:.2f}±{half:.2f}%")
    click.echo(f"episodes: {report['episode_count']}")
    click.echo(f"wall time: {doc['wall_time_s']:.2f}s")
    click.echo(f"report: {out_path}")


@main.command("gen-data")
@click.option("--spec", default="default",
              help="Synthetic spec: JSON file, key=value list, or 'default'.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--server", default=None, help="Base URL of a running service.")
def gen_data(spec: str, out_path: str, server: str | None) -> None:
    """Generate a synthetic dataset file."""
    doc = _request(
        server, "/datasets/synthetic",
        {"spec": _parse_synthetic_spec(spec), "out_path": out_path},
    )
    click.echo(
        f"wrote {doc['out_path']}: {doc['classes']} classes, "
        f"{doc['samples']} samples, "
        f"{doc['channels']}x{doc['height']}x{doc['width']} descriptors"
    )


@main.command("inspect")
@click.argument("path", type=click.Path())
@click.option("--server", default=None, help="Base URL of a running service.")
def inspect_cmd(path: str, server: str | None) -> None:
    """Summarize a binary descriptor dataset file."""
    doc = _request(server, "/datasets/inspect", {"path": path})
    click.echo(
        f"{doc['samples']} samples, {len(doc['classes'])} classes, "
        f"{doc['channels']}x{doc['height']}x{doc['width']} descriptors"
    )
    for name in doc["classes"]:
        click.echo(f"  {name}: {doc['samples_per_class'][name]}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
