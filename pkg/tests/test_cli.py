"""CLI: config layering, exit codes, rendering modes, and a frozen help
snapshot.

Regenerate the snapshot after an intentional flag change with

    python3 tests/test_cli.py --regen-help
"""

import itertools
import json
import os
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from memgrain import cli
from memgrain.cli import CliConfig, main, read_config_file, resolve_config
from memgrain.llm import OfflineLlm
from memgrain.service import create_app
from memgrain.store import MemoryStore

FIXTURES = Path(__file__).parent / "fixtures"
HELP_PATH = FIXTURES / "cli_help.txt"

T0 = 1_700_000_000_000
SUBCOMMANDS = [
    [],
    ["remember"],
    ["recall"],
    ["answer"],
    ["conflicts"],
    ["conflicts", "list"],
    ["conflicts", "resolve"],
    ["sessions"],
    ["asof"],
    ["changed-since"],
    ["daily-summary"],
    ["serve"],
    ["bench"],
]


def make_app(root, threshold=0.90):
    ticks = itertools.count(T0, 1_000)
    ids = itertools.count(1)
    store = MemoryStore(
        root,
        contradiction_threshold=threshold,
        clock=lambda: next(ticks),
        entropy=lambda: next(ids),
    )
    return create_app(store, OfflineLlm()), store


class _Recorder:
    """Hands the CLI a real in-process client and keeps the last response
    so tests can compare it against what the CLI printed."""

    def __init__(self, app):
        self.app = app
        self.last = None
        self.last_headers = None

    def __call__(self, cfg):
        client = TestClient(self.app)
        original = client.request

        def request(method, url, **kw):
            self.last_headers = kw.get("headers") or {}
            self.last = original(method, url, **kw)
            return self.last

        client.request = request
        return client


@pytest.fixture()
def wired(tmp_path, monkeypatch):
    app, store = make_app(tmp_path / "data")
    recorder = _Recorder(app)
    monkeypatch.setattr(cli, "_make_client", recorder)
    # keep a stray user config out of the resolution chain
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path / "absent.toml"))
    monkeypatch.delenv(cli.TOKEN_ENV, raising=False)
    monkeypatch.delenv(cli.NAMESPACE_ENV, raising=False)
    return CliRunner(), recorder, store


def _all_output(result):
    try:
        err = result.stderr
    except ValueError:
        err = ""
    return result.output + err


# -- config resolution ---------------------------------------------------------


def test_read_config_file_parses_key_value_lines(tmp_path):
    path = tmp_path / "cfg"
    path.write_text(
        "# comment\n"
        "server_url = http://box:9999\n"
        "token=\"quoted\"\n"
        "\n"
        "namespace = 'a1'\n"
    )
    assert read_config_file(path) == {
        "server_url": "http://box:9999", "token": "quoted", "namespace": "a1",
    }
    (tmp_path / "bad").write_text("just words\n")
    with pytest.raises(ValueError):
        read_config_file(tmp_path / "bad")


def test_config_layers_file_env_flags(tmp_path):
    path = tmp_path / "cfg"
    path.write_text("server_url=http://file:1\ntoken=file-token\noutput=json\n")

    cfg = resolve_config(str(path), env={})
    assert cfg == CliConfig("http://file:1", "file-token", "json", None)

    cfg = resolve_config(str(path), env={cli.URL_ENV: "http://env:2",
                                         cli.NAMESPACE_ENV: "envns"})
    assert cfg.server_url == "http://env:2"
    assert cfg.token == "file-token"  # env does not erase what it doesn't set
    assert cfg.namespace == "envns"

    cfg = resolve_config(str(path), env={cli.URL_ENV: "http://env:2"},
                         server_url="http://flag:3", output="table")
    assert cfg.server_url == "http://flag:3"
    assert cfg.output == "table"


def test_config_defaults_and_missing_file(tmp_path):
    cfg = resolve_config(str(tmp_path / "nope"), env={})
    assert cfg == CliConfig()
    assert cfg.server_url == "http://127.0.0.1:7749"
    # unknown keys in the file are ignored rather than fatal
    path = tmp_path / "cfg"
    path.write_text("server_url=http://x:1\nfancy_new_knob=yes\n")
    assert resolve_config(str(path), env={}).server_url == "http://x:1"


def test_config_path_from_env(tmp_path):
    path = tmp_path / "elsewhere.toml"
    path.write_text("namespace=fromenv\n")
    cfg = resolve_config(None, env={cli.CONFIG_ENV: str(path)})
    assert cfg.namespace == "fromenv"


def test_bad_output_value_is_usage_error(tmp_path):
    path = tmp_path / "cfg"
    path.write_text("output=yaml\n")
    import click

    with pytest.raises(click.UsageError):
        resolve_config(str(path), env={})


# -- happy paths through every subcommand ----------------------------------------


def test_remember_prints_id_and_roundtrips(wired):
    runner, recorder, store = wired
    result = runner.invoke(main, [
        "remember", "-n", "a1", "-t", "decision", "--tag", "planning",
        "Ship v2 Friday",
    ])
    assert result.exit_code == 0, result.output
    rid = result.output.splitlines()[0]
    assert store.get(rid).content == "Ship v2 Friday"
    assert store.get(rid).type.label == "decision"


def test_json_mode_prints_raw_api_body(wired):
    runner, recorder, store = wired
    result = runner.invoke(main, [
        "--output", "json", "remember", "-n", "a1", "Deploy window opens at noon",
    ])
    assert result.exit_code == 0
    assert result.output == recorder.last.text + "\n"
    assert json.loads(result.output)["state"] == "active"

    result = runner.invoke(main, [
        "--output", "json", "recall", "-n", "a1", "-q", "deploy window",
    ])
    assert result.exit_code == 0
    assert result.output == recorder.last.text + "\n"

    result = runner.invoke(main, [
        "--output", "json", "answer", "-n", "a1", "when does the deploy window open",
    ])
    assert result.output == recorder.last.text + "\n"
    assert json.loads(result.output)["answer"] == "Deploy window opens at noon"

    for args in (["conflicts", "list"], ["sessions"],
                 ["asof", "-n", "a1", str(T0 + 10_000)],
                 ["changed-since", "-n", "a1", "0"],
                 ["daily-summary", "-n", "a1", "2023-11-14"]):
        result = runner.invoke(main, ["--output", "json"] + args)
        assert result.exit_code == 0, (args, _all_output(result))
        assert result.output == recorder.last.text + "\n", args


def test_recall_renders_ranked_table(wired):
    runner, recorder, store = wired
    # distinct types: detection is same-type only, so these similar short
    # sentences stay active instead of parking each other as provisional
    for i, label in enumerate(("fact", "event", "preference")):
        runner.invoke(main, ["remember", "-n", "a1", "-t", label,
                             f"Build {i} finished clean"])
    result = runner.invoke(main, [
        "recall", "-n", "a1", "-q", "which build finished", "--max-k", "2",
    ])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0].split() == ["#", "score", "type", "id", "content"]
    assert len(lines) == 4  # header, rule, two rows
    assert lines[2].startswith("1 ")


def test_conflict_list_and_resolve_flow(wired):
    runner, recorder, store = wired
    runner.invoke(main, ["remember", "-n", "a1", "-t", "decision",
                         "Project deadline is April 15"])
    result = runner.invoke(main, ["--output", "json", "remember", "-n", "a1",
                                  "-t", "decision", "Project deadline is May 1"])
    opened = json.loads(result.output)["conflicts"]
    assert len(opened) == 1
    cid = opened[0]["conflict_id"]

    listing = runner.invoke(main, ["conflicts", "list", "-n", "a1", "--state", "open"])
    assert cid in listing.output

    result = runner.invoke(main, [
        "conflicts", "resolve", cid, "--action", "supersede", "-n", "a1",
        "--actor", "reviewer",
    ])
    assert result.exit_code == 0
    assert result.output.strip() == f"{cid} resolved: supersede"
    assert store.list_conflicts("a1", "open") == []


def test_daily_summary_prints_rendered_markdown(wired):
    runner, recorder, store = wired
    runner.invoke(main, ["remember", "-n", "a1", "Digest fodder"])
    result = runner.invoke(main, ["daily-summary", "-n", "a1", "2023-11-14"])
    assert result.exit_code == 0
    assert result.output.startswith("# Daily summary — a1 — 2023-11-14")


def test_namespace_default_comes_from_config(wired, tmp_path, monkeypatch):
    runner, recorder, store = wired
    path = tmp_path / "cfg"
    path.write_text("namespace=a9\n")
    result = runner.invoke(main, ["--config", str(path), "remember", "No flag here"])
    assert result.exit_code == 0, _all_output(result)
    assert store.get(result.output.splitlines()[0]).namespace == "a9"


def test_token_flows_into_auth_header(wired):
    runner, recorder, store = wired
    result = runner.invoke(main, ["--token", "sekrit", "sessions"])
    assert result.exit_code == 0
    assert recorder.last_headers.get("authorization") == "Bearer sekrit"
    runner.invoke(main, ["sessions"])
    assert "authorization" not in recorder.last_headers


# -- exit codes -------------------------------------------------------------------


def test_usage_errors_exit_2(wired):
    runner, recorder, store = wired
    assert runner.invoke(main, ["recall", "-n", "a1"]).exit_code == 2  # no -q
    assert runner.invoke(main, ["definitely-not-a-command"]).exit_code == 2
    result = runner.invoke(main, ["remember", "No namespace anywhere"])
    assert result.exit_code == 2
    assert "namespace required" in _all_output(result)
    bad_action = runner.invoke(main, ["conflicts", "resolve", "c1", "--action", "shrug"])
    assert bad_action.exit_code == 2


def test_domain_errors_exit_1(wired):
    runner, recorder, store = wired
    result = runner.invoke(main, [
        "conflicts", "resolve", "no-such-conflict", "--action", "retain",
    ])
    assert result.exit_code == 1
    assert "not_found" in _all_output(result)

    result = runner.invoke(main, ["remember", "-n", "a1", "-t", "rumor", "x"])
    assert result.exit_code == 1
    assert "unknown_type" in _all_output(result)


def test_connection_refused_exits_1_with_hint(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path / "absent.toml"))
    runner = CliRunner()
    result = runner.invoke(main, [
        "--server-url", "http://127.0.0.1:9", "sessions",
    ])
    assert result.exit_code == 1
    out = _all_output(result)
    assert "is the server running" in out
    assert "memgrain serve" in out


# -- serve delegation ---------------------------------------------------------------


def test_serve_passes_through_options(tmp_path, monkeypatch):
    seen = {}
    from memgrain import service

    monkeypatch.setattr(service, "serve", lambda **kw: seen.update(kw))
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path / "absent.toml"))
    monkeypatch.delenv(cli.TOKEN_ENV, raising=False)
    runner = CliRunner()
    result = runner.invoke(main, [
        "--token", "t0k", "serve", "--host", "10.0.0.5", "--port", "8123",
        "--data-dir", str(tmp_path / "d"),
    ])
    assert result.exit_code == 0, _all_output(result)
    assert seen == {"host": "10.0.0.5", "port": 8123,
                    "data_dir": str(tmp_path / "d"), "token": "t0k"}


# -- bench ---------------------------------------------------------------------------


def test_bench_writes_report_files(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path / "absent.toml"))
    runner = CliRunner()
    out_dir = tmp_path / "results"
    result = runner.invoke(main, [
        "bench", "--seed", "3", "--distractors", "60", "--needles", "12",
        "--out", str(out_dir),
    ])
    assert result.exit_code == 0, _all_output(result)
    assert (out_dir / "ablation.csv").exists()
    assert (out_dir / "ablation.md").exists()
    assert result.output.startswith("| stage |")
    assert "wrote" in result.output

    as_json = runner.invoke(main, [
        "--output", "json", "bench", "--seed", "3", "--distractors", "60",
        "--needles", "12", "--out", str(out_dir), "--uncapped",
    ])
    assert as_json.exit_code == 0
    payload = json.loads(as_json.output)
    assert [s["stage"] for s in payload["stages"]] == [
        "stage1", "stage2", "stage3", "uncapped",
    ]


# -- help snapshot -----------------------------------------------------------------


def _help_snapshot() -> str:
    os.environ["COLUMNS"] = "80"  # pin click's wrap width
    runner = CliRunner()
    parts = []
    for args in SUBCOMMANDS:
        result = runner.invoke(main, args + ["--help"])
        assert result.exit_code == 0, args
        title = " ".join(["memgrain"] + args)
        parts.append(f"$ {title} --help\n{result.output}")
    return "\n".join(parts)


def test_every_flag_appears_in_help():
    snapshot = _help_snapshot()
    for flag in ("--config", "--server-url", "--token", "--output",
                 "--namespace", "--type", "--tag", "--session-id", "--query",
                 "--threshold", "--max-k", "--as-of", "--include-superseded",
                 "--state", "--action", "--actor", "--until", "--host",
                 "--port", "--data-dir", "--seed", "--distractors",
                 "--needles", "--uncapped"):
        assert flag in snapshot, flag


def test_help_matches_snapshot():
    assert _help_snapshot() == HELP_PATH.read_text("utf-8")


if __name__ == "__main__":
    import sys

    if "--regen-help" in sys.argv:
        HELP_PATH.write_text(_help_snapshot(), "utf-8")
        print(f"wrote {HELP_PATH}")
    else:
        print(__doc__)
