"""Command-line client mirroring the HTTP API, plus the server launcher
and the in-process retrieval benchmark.

Configuration is resolved in three layers: a key=value file (default
``~/.memgrain.toml``), then environment variables, then flags; later
layers win. The output mode changes rendering only — ``--output json``
prints the API body exactly as the server sent it.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import click
import httpx

from .llm import iso8601

DEFAULT_SERVER_URL = "http://127.0.0.1:7749"
CONFIG_PATH = "~/.memgrain.toml"

URL_ENV = "MEMGRAIN_URL"
TOKEN_ENV = "MEMGRAIN_TOKEN"
OUTPUT_ENV = "MEMGRAIN_OUTPUT"
NAMESPACE_ENV = "MEMGRAIN_NAMESPACE"
CONFIG_ENV = "MEMGRAIN_CONFIG"


@dataclass(frozen=True)
class CliConfig:
    server_url: str = DEFAULT_SERVER_URL
    token: Optional[str] = None
    output: str = "table"
    namespace: Optional[str] = None


def read_config_file(path: Path) -> dict:
    """Parse a key=value file; quotes around values are optional."""
    values = {}
    for raw in path.read_text("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {raw!r}")
        key, _, value = line.partition("=")
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        values[key.strip()] = value
    return values


def resolve_config(
    config_path: Optional[str] = None,
    env: Optional[dict] = None,
    **flags,
) -> CliConfig:
    """file -> env -> flags, later layers winning key by key."""
    env = os.environ if env is None else env
    cfg = CliConfig()

    path = Path(config_path or env.get(CONFIG_ENV, CONFIG_PATH)).expanduser()
    if path.exists():
        known = {k: v for k, v in read_config_file(path).items()
                 if k in CliConfig.__dataclass_fields__}
        cfg = replace(cfg, **known)

    for key, var in (("server_url", URL_ENV), ("token", TOKEN_ENV),
                     ("output", OUTPUT_ENV), ("namespace", NAMESPACE_ENV)):
        if env.get(var):
            cfg = replace(cfg, **{key: env[var]})

    overrides = {k: v for k, v in flags.items() if v is not None}
    if overrides:
        cfg = replace(cfg, **overrides)
    if cfg.output not in ("table", "json"):
        raise click.UsageError(f"output must be 'table' or 'json', got {cfg.output!r}")
    return cfg


# tests swap this out to aim commands at an in-memory app
def _make_client(cfg: CliConfig) -> httpx.Client:
    return httpx.Client(base_url=cfg.server_url, timeout=30.0)


def _call(cfg: CliConfig, method: str, path: str, *, body=None, params=None):
    headers = {"authorization": f"Bearer {cfg.token}"} if cfg.token else {}
    try:
        with _make_client(cfg) as client:
            resp = client.request(
                method, path, json=body, params=params, headers=headers
            )
    except httpx.ConnectError as exc:
        raise click.ClickException(
            f"cannot reach {cfg.server_url} ({exc}); is the server running? "
            "start one with: memgrain serve"
        ) from exc
    if resp.status_code >= 400:
        try:
            payload = resp.json()
            message = f"{payload['code']}: {payload['message']}"
        except (ValueError, KeyError):
            message = f"HTTP {resp.status_code}"
        raise click.ClickException(message)
    return resp


def _emit(cfg: CliConfig, resp, render) -> None:
    if cfg.output == "json":
        click.echo(resp.text)
    else:
        click.echo(render(resp.json()))


def _clip(text: str, width: int = 60) -> str:
    return text if len(text) <= width else text[: width - 1] + "…"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    if not rows:
        return "(empty)"
    widths = [
        max(len(headers[i]), max(len(r[i]) for r in rows))
        for i in range(len(headers))
    ]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*headers), fmt.format(*("-" * w for w in widths))]
    lines.extend(fmt.format(*row) for row in rows)
    return "\n".join(lines)


def _need_namespace(cfg: CliConfig, namespace: Optional[str]) -> str:
    ns = namespace or cfg.namespace
    if not ns:
        raise click.UsageError(
            "namespace required: pass -n/--namespace or set it in the config file"
        )
    return ns


def _record_rows(records: list[dict]) -> list[list[str]]:
    return [
        [r["id"], r["type"], r["state"], iso8601(r["created_at"]), _clip(r["content"])]
        for r in records
    ]


@click.group(name="memgrain")
@click.option("--config", "config_path", metavar="PATH",
              help=f"Config file (key=value lines); default {CONFIG_PATH}.")
@click.option("--server-url", metavar="URL", help="API server base URL.")
@click.option("--token", metavar="TOKEN", help="Bearer token for the API.")
@click.option("-o", "--output", type=click.Choice(["table", "json"]),
              default=None, help="Rendering mode; json prints raw API bodies.")
@click.pass_context
def main(ctx, config_path, server_url, token, output):
    """Typed long-term memory for agents: store, search, and reconcile."""
    ctx.obj = resolve_config(
        config_path, server_url=server_url, token=token, output=output
    )


@main.command()
@click.argument("content")
@click.option("-n", "--namespace", metavar="NS", help="Target namespace.")
@click.option("-t", "--type", "type_", metavar="TYPE",
              help="Memory type (default fact).")
@click.option("--tag", "tags", multiple=True, metavar="TAG",
              help="Attach a tag; repeatable.")
@click.option("--session-id", metavar="SID", help="Write into this session.")
@click.pass_obj
def remember(cfg, content, namespace, type_, tags, session_id):
    """Store CONTENT as a new memory."""
    body = {"namespace": _need_namespace(cfg, namespace), "content": content}
    if type_:
        body["type"] = type_
    if tags:
        body["tags"] = list(tags)
    if session_id:
        body["session_id"] = session_id
    resp = _call(cfg, "POST", "/v1/remember", body=body)

    def render(out):
        lines = [out["id"]]
        for conflict in out["conflicts"]:
            n = len(conflict["candidates"])
            lines.append(
                f"conflict {conflict['conflict_id']}: {n} candidate(s); "
                f"resolve with: memgrain conflicts resolve {conflict['conflict_id']}"
            )
        return "\n".join(lines)

    _emit(cfg, resp, render)


@main.command()
@click.option("-n", "--namespace", metavar="NS", help="Namespace to search.")
@click.option("-q", "--query", required=True, metavar="TEXT", help="Query text.")
@click.option("--threshold", type=float, default=0.05, show_default=True,
              help="Minimum score to return.")
@click.option("--max-k", type=int, default=100, show_default=True,
              help="Maximum hits to return.")
@click.option("--type", "types", multiple=True, metavar="TYPE",
              help="Restrict to these types; repeatable.")
@click.option("--as-of", type=int, metavar="MS",
              help="Search the namespace as it was at this timestamp.")
@click.option("--include-superseded", is_flag=True,
              help="Let superseded records back into the ranking.")
@click.pass_obj
def recall(cfg, namespace, query, threshold, max_k, types, as_of,
           include_superseded):
    """Rank stored memories against a query."""
    body = {
        "namespace": _need_namespace(cfg, namespace),
        "query": query,
        "threshold": threshold,
        "max_k": max_k,
    }
    if types:
        body["types"] = list(types)
    if as_of is not None:
        body["as_of"] = as_of
    if include_superseded:
        body["include_superseded"] = True
    resp = _call(cfg, "POST", "/v1/recall", body=body)

    def render(out):
        rows = [
            [str(i + 1), f"{h['score']:.4f}", h["record"]["type"],
             h["record"]["id"], _clip(h["record"]["content"])]
            for i, h in enumerate(out["hits"])
        ]
        return _table(["#", "score", "type", "id", "content"], rows)

    _emit(cfg, resp, render)


@main.command()
@click.argument("question")
@click.option("-n", "--namespace", metavar="NS", help="Namespace to consult.")
@click.option("--threshold", type=float, default=0.05, show_default=True,
              help="Minimum score for context hits.")
@click.option("--max-k", type=int, default=100, show_default=True,
              help="Maximum context hits.")
@click.pass_obj
def answer(cfg, question, namespace, threshold, max_k):
    """Answer QUESTION from stored memories."""
    body = {
        "namespace": _need_namespace(cfg, namespace),
        "question": question,
        "threshold": threshold,
        "max_k": max_k,
    }
    resp = _call(cfg, "POST", "/v1/answer", body=body)

    def render(out):
        lines = [out["answer"]]
        if out["citations"]:
            lines.append("citations: " + ", ".join(out["citations"]))
        return "\n".join(lines)

    _emit(cfg, resp, render)


@main.group()
def conflicts():
    """Inspect and resolve contradiction reports."""


@conflicts.command("list")
@click.option("-n", "--namespace", metavar="NS",
              help="Restrict to one namespace; default all.")
@click.option("--state", type=click.Choice(["open", "resolved", "all"]),
              default="all", show_default=True, help="Filter by state.")
@click.pass_obj
def conflicts_list(cfg, namespace, state):
    """List conflicts, newest first."""
    params = {"state": state}
    ns = namespace or cfg.namespace
    if ns:
        params["namespace"] = ns
    resp = _call(cfg, "GET", "/v1/conflicts", params=params)

    def render(out):
        rows = [
            [c["conflict_id"], c["state"], c["new_record"],
             str(len(c["candidates"])), iso8601(c["opened_at"])]
            for c in out["conflicts"]
        ]
        return _table(
            ["conflict_id", "state", "new_record", "candidates", "opened"], rows
        )

    _emit(cfg, resp, render)


@conflicts.command("resolve")
@click.argument("conflict_id")
@click.option("--action", required=True,
              type=click.Choice(["supersede", "retain", "annotate"]),
              help="What to do with the contested records.")
@click.option("-n", "--namespace", metavar="NS",
              help="Namespace hint; default searches all.")
@click.option("--actor", metavar="NAME", help="Who decided; recorded as-is.")
@click.pass_obj
def conflicts_resolve(cfg, conflict_id, action, namespace, actor):
    """Apply ACTION to one open conflict."""
    body = {"action": action}
    ns = namespace or cfg.namespace
    if ns:
        body["namespace"] = ns
    if actor:
        body["actor"] = actor
    resp = _call(cfg, "POST", f"/v1/conflicts/{conflict_id}/resolve", body=body)

    def render(out):
        c = out["conflict"]
        return f"{c['conflict_id']} resolved: {c['resolution']['action']}"

    _emit(cfg, resp, render)


@main.command()
@click.option("-n", "--namespace", metavar="NS",
              help="Restrict to one namespace; default all.")
@click.pass_obj
def sessions(cfg, namespace):
    """List recorded sessions."""
    params = {}
    ns = namespace or cfg.namespace
    if ns:
        params["namespace"] = ns
    resp = _call(cfg, "GET", "/v1/sessions", params=params)

    def render(out):
        rows = [
            [s["session_id"], s["namespace"], iso8601(s["start"]), iso8601(s["end"])]
            for s in out["sessions"]
        ]
        return _table(["session_id", "namespace", "start", "end"], rows)

    _emit(cfg, resp, render)


@main.command()
@click.argument("t", type=int)
@click.option("-n", "--namespace", metavar="NS", help="Namespace to read.")
@click.pass_obj
def asof(cfg, t, namespace):
    """Show the records alive at timestamp T (ms since epoch)."""
    resp = _call(cfg, "GET", "/v1/memories/asof", params={
        "namespace": _need_namespace(cfg, namespace), "t": t,
    })
    _emit(cfg, resp, lambda out: _table(
        ["id", "type", "state", "created", "content"],
        _record_rows(out["records"]),
    ))


@main.command("changed-since")
@click.argument("since", type=int)
@click.option("--until", type=int, metavar="MS",
              help="Exclusive upper bound; default unbounded.")
@click.option("-n", "--namespace", metavar="NS", help="Namespace to read.")
@click.pass_obj
def changed_since(cfg, since, until, namespace):
    """Show records whose lifecycle changed at or after SINCE (ms)."""
    params = {"namespace": _need_namespace(cfg, namespace), "changed_since": since}
    if until is not None:
        params["until"] = until
    resp = _call(cfg, "GET", "/v1/memories", params=params)
    _emit(cfg, resp, lambda out: _table(
        ["id", "type", "state", "created", "content"],
        _record_rows(out["records"]),
    ))


@main.command("daily-summary")
@click.argument("date")
@click.option("-n", "--namespace", metavar="NS", help="Namespace to digest.")
@click.pass_obj
def daily_summary(cfg, date, namespace):
    """Render the Markdown digest for DATE (YYYY-MM-DD)."""
    resp = _call(cfg, "GET", "/v1/daily-summary", params={
        "namespace": _need_namespace(cfg, namespace), "date": date,
    })
    _emit(cfg, resp, lambda out: out["rendered"])


@main.command()
@click.option("--host", metavar="HOST",
              help="Bind address; default loopback unless a token is set.")
@click.option("--port", type=int, metavar="PORT",
              help="Port; default 7749 or MEMGRAIN_PORT.")
@click.option("--data-dir", metavar="DIR",
              help="Storage root; default memgrain-data or MEMGRAIN_DATA_DIR.")
@click.pass_obj
def serve(cfg, host, port, data_dir):
    """Run the API server in the foreground."""
    from .service import serve as run_server

    run_server(host=host, port=port, data_dir=data_dir, token=cfg.token)


@main.command()
@click.option("--seed", type=int, default=1, show_default=True,
              help="Corpus seed; same seed, same corpus.")
@click.option("--distractors", type=int, default=100_000, show_default=True,
              help="Background sentences to ingest.")
@click.option("--needles", type=int, default=500, show_default=True,
              help="Planted facts to query back.")
@click.option("--out", "out_dir", default="results", show_default=True,
              metavar="DIR", help="Where to write ablation.csv and ablation.md.")
@click.option("--uncapped", is_flag=True,
              help="Add an uncapped-budget stage after the standard three.")
@click.pass_obj
def bench(cfg, seed, distractors, needles, out_dir, uncapped):
    """Run the staged retrieval benchmark locally (no server needed)."""
    from .bench import STAGE_CONFIGS, UNCAPPED_CONFIG, run_ablation, write_report

    configs = STAGE_CONFIGS + (UNCAPPED_CONFIG,) if uncapped else STAGE_CONFIGS
    with tempfile.TemporaryDirectory(prefix="memgrain-bench-") as scratch:
        metrics = run_ablation(Path(scratch), seed, distractors, needles, configs)
    csv_path, md_path = write_report(metrics, Path(out_dir))
    if cfg.output == "json":
        import json as _json

        click.echo(_json.dumps(
            {"csv": str(csv_path), "markdown": str(md_path),
             "stages": [
                 {"stage": m.stage_name, "needle_recall": m.needle_recall}
                 for m in metrics
             ]},
            sort_keys=True, separators=(",", ":"),
        ))
    else:
        click.echo(md_path.read_text("utf-8"), nl=False)
        click.echo(f"wrote {csv_path} and {md_path}")


if __name__ == "__main__":
    main()
