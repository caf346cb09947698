"""Command-line client for the pricing service.

The CLI is a thin HTTP client: every subcommand posts to the FastAPI
application, by default in-process through an ASGI transport, or to a
running server given with --server. Exit codes: 0 success (and, for
verdict-bearing commands, PASS/holds), 2 usage or input error, 3
no-arbitrage violation or verification failure, 4 capacity exceeded.
"""
from __future__ import annotations

import json
import sys
from typing import Optional

import click
import httpx

from .service.app import create_app

EXIT_USAGE = 2
EXIT_VIOLATION = 3
EXIT_CAPACITY = 4

_STATUS_EXIT = {409: EXIT_VIOLATION, 413: EXIT_CAPACITY, 422: EXIT_USAGE}


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process: drive the ASGI app directly, no socket involved
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return TestClient(create_app(), raise_server_exceptions=False)


def _read_input(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "rb") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {path}: {exc}")


def _flatten(prefix: str, value, rows) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        text = " ".join(str(v) for v in value) if isinstance(value, list) else str(value)
        rows.append((prefix, text))


def _render_table(doc: dict) -> str:
    if "records" in doc and isinstance(doc["records"], list):
        lines = []
        width = max((len(r["name"]) for r in doc["records"]), default=4)
        for r in doc["records"]:
            mark = "PASS" if r["passed"] else "FAIL"
            lines.append(f"{mark}  {r['name']:<{width}}  {r['left']} | {r['right']}")
        verdict = "PASS" if doc.get("passed") else "FAIL"
        lines.append(f"overall: {verdict}"
                     + (f"  value={doc['common_value']}" if doc.get("common_value") else ""))
        return "\n".join(lines)
    rows: list = []
    _flatten("", doc, rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _emit(doc: dict, output: str, fmt: str) -> None:
    text = json.dumps(doc, indent=2) if fmt == "json" else _render_table(doc)
    if output == "-":
        click.echo(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _finish(response: httpx.Response, output: str, fmt: str,
            fail_when=None) -> None:
    doc = response.json()
    _emit(doc, output, fmt)
    if response.status_code >= 400:
        sys.exit(_STATUS_EXIT.get(response.status_code, EXIT_USAGE))
    if fail_when is not None and fail_when(doc):
        sys.exit(EXIT_VIOLATION)


def io_options(fn):
    fn = click.option("--output", default="-", show_default=True,
                      help="Output file, or - for stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "table"]),
                      default="json", show_default=True)(fn)
    return fn


def input_option(fn):
    return click.option("--input", "input_path", required=True,
                        help="Market file (JSON), or - for stdin.")(fn)


@click.group()
@click.option("--server", default=None,
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Exact super-replication pricing on finite scenario lattices."""
    ctx.obj = server


@main.command()
@input_option
@io_options
@click.pass_obj
def validate(server, input_path, output, fmt):
    """Parse and validate a market file."""
    with _client(server) as client:
        resp = client.post("/validate", json={"market": _read_input(input_path)})
    _finish(resp, output, fmt)


@main.command()
@input_option
@io_options
@click.option("--mode", type=click.Choice(["qs", "mono", "lower"]), default="qs",
              show_default=True, help="Pricing semantics.")
@click.option("--prior", "prior_path", default=None,
              help="Prior document (JSON) for --mode mono.")
@click.pass_obj
def price(server, input_path, output, fmt, mode, prior_path):
    """Super-replication price of the market file's claim."""
    body = {"market": _read_input(input_path), "mode": mode}
    if prior_path:
        body["prior"] = _read_input(prior_path)
    with _client(server) as client:
        resp = client.post("/price", json=body)
    _finish(resp, output, fmt)


@main.command()
@input_option
@io_options
@click.option("--scope", type=click.Choice(["qs", "family"]), default="qs",
              show_default=True,
              help="qs: joint-support test; family: every single generator.")
@click.option("--prior", "prior_path", default=None,
              help="Test one prior document instead of a scope.")
@click.pass_obj
def na(server, input_path, output, fmt, scope, prior_path):
    """No-arbitrage verdict with certificate on failure."""
    body = {"market": _read_input(input_path), "scope": scope}
    if prior_path:
        body["prior"] = _read_input(prior_path)
    with _client(server) as client:
        resp = client.post("/na", json=body)
    _finish(resp, output, fmt, fail_when=lambda doc: not doc.get("holds"))


@main.command()
@input_option
@io_options
@click.pass_obj
def supports(server, input_path, output, fmt):
    """Charged increment points per reachable node."""
    with _client(server) as client:
        resp = client.post("/supports", json={"market": _read_input(input_path)})
    _finish(resp, output, fmt)


@main.command()
@input_option
@io_options
@click.option("--n", "ns", multiple=True, type=int,
              help="Perturbation indices (repeatable); default 1 10 100.")
@click.pass_obj
def dual(server, input_path, output, fmt, ns):
    """Dual price over martingale measures, with perturbation evidence."""
    body = {"market": _read_input(input_path)}
    if ns:
        body["ns"] = list(ns)
    with _client(server) as client:
        resp = client.post("/dual", json=body)
    _finish(resp, output, fmt)


@main.command()
@input_option
@io_options
@click.option("--what", type=click.Choice(["ptilde", "phat", "family", "repair"]),
              required=True)
@click.option("--lam", default="1/2", show_default=True,
              help="Mixing parameter in (0, 1] as a rational string.")
@click.option("--prior", "prior_path", default=None,
              help="Base prior document for --what repair.")
@click.pass_obj
def construct(server, input_path, output, fmt, what, lam, prior_path):
    """Build a constructive prior (or mixed-family market)."""
    body = {"market": _read_input(input_path), "what": what, "lam": lam}
    if prior_path:
        body["prior"] = _read_input(prior_path)
    with _client(server) as client:
        resp = client.post("/construct", json=body)
    _finish(resp, output, fmt)


@main.command()
@io_options
@click.option("--name", required=True, help="Fixture name, e.g. FIX-A.")
@click.option("--param", type=int, default=None,
              help="Fixture parameter (FIX-B: truncation level; FIX-D: seed).")
@click.pass_obj
def fixture(server, output, fmt, name, param):
    """Emit a canonical fixture as a market file."""
    params = {} if param is None else {"param": param}
    with _client(server) as client:
        resp = client.get(f"/fixture/{name}", params=params)
    if resp.status_code == 200 and fmt == "json":
        # the market document alone round-trips through `--input`
        _emit(resp.json()["market"], output, fmt)
        return
    _finish(resp, output, fmt)


@main.command(name="verify-chain")
@input_option
@io_options
@click.option("--lam", default="1/2", show_default=True)
@click.option("--sample-seed", type=int, default=0, show_default=True)
@click.pass_obj
def verify_chain(server, input_path, output, fmt, lam, sample_seed):
    """Check every price equality on one market; exit 3 on any FAIL."""
    body = {"market": _read_input(input_path), "lam": lam,
            "sample_seed": sample_seed}
    with _client(server) as client:
        resp = client.post("/verify-chain", json=body)
    _finish(resp, output, fmt, fail_when=lambda doc: not doc.get("passed"))


@main.command(name="verify-random")
@io_options
@click.option("--count", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-horizon", type=int, default=3, show_default=True)
@click.option("--max-outcomes", type=int, default=4, show_default=True)
@click.option("--max-assets", type=int, default=2, show_default=True)
@click.option("--max-generators", type=int, default=3, show_default=True)
@click.pass_obj
def verify_random(server, output, fmt, count, seed, max_horizon, max_outcomes,
                  max_assets, max_generators):
    """Verify the equality chain on seeded random markets."""
    body = {"count": count, "seed": seed, "max_horizon": max_horizon,
            "max_outcomes": max_outcomes, "max_assets": max_assets,
            "max_generators": max_generators}
    with _client(server) as client:
        resp = client.post("/verify-random", json=body)
    _finish(resp, output, fmt,
            fail_when=lambda doc: doc.get("passed") != doc.get("verified"))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
