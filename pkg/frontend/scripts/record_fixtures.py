#!/usr/bin/env python3
"""Record server fixtures for the dashboard test suite.

Builds two bit-identical servers from one deterministic journal, issues
the association decision once through the CLI client path and once as the
literal HTTP request the dashboard constructs, proves the resulting
states are identical modulo timestamps, and freezes everything
(requests, queue payload, results payloads, normalized states) into
tests/fixtures/recorded_server.json.

Run from frontend/:  python3 scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import re
import sys
import tempfile
from pathlib import Path

import httpx

from fedeval.agent import RecordingTransport, ServerClient
from fedeval.registry import hash_bytes
from fedeval.server import Store, replay_journal
from fedeval.server.store import STORE_FORMAT, state_to_json

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
from live_server import LiveServer  # noqa: E402

NOW = "2026-08-10T12:00:00Z"
TOKENS = {
    "operator": "fixture-operator-token",
    "carol": "fixture-carol-token",
    "dana": "fixture-dana-token",
    "mona": "fixture-mona-token",
    "paula": "fixture-paula-token",
}


def _uid(text: str) -> str:
    return str(hash_bytes(text.encode()))


def _entry(op: str, actor: str, payload: dict, new_id: str) -> dict:
    return {"op": op, "actor_id": actor, "payload": payload, "now": NOW, "new_id": new_id}


def setup_journal() -> tuple[list[dict], dict]:
    ids = {
        "bench": "fx-bench-pub",
        "bench_private": "fx-bench-priv",
        "prep": "fx-cube-prep",
        "metrics": "fx-cube-metrics",
        "ref": "fx-cube-ref",
        "model1": "fx-cube-model1",
        "model2": "fx-cube-model2",
        "ds": _uid("fixture-dataset"),
        "queue_assoc": "fx-assoc-queue",
    }
    cube = lambda name, kind: {  # noqa: E731
        "name": name, "kind": kind, "manifest_uid": _uid(f"{name}/m"),
        "image_ref": f"example.org/{name}:1", "image_uid": _uid(f"{name}/i"),
        "download_urls": {"manifest": f"https://assets.example.org/{name}/cube.yaml"},
    }
    bench = lambda name, policy: {  # noqa: E731
        "name": name, "description": "fixture benchmark", "docs_url": "https://example.org/d",
        "preparation_cube": ids["prep"], "metrics_cube": ids["metrics"],
        "reference_model_cube": ids["ref"],
        "metric_specs": [
            {"name": "accuracy", "range": [0, 1], "decomposable": True},
            {"name": "sensitivity", "range": [0, 1]},
        ],
        "visibility": "OPEN", "release_policy": policy,
    }
    account = lambda who, roles: _entry(  # noqa: E731
        "create_account", "operator" if who != "operator" else "",
        {"id": who, "display_name": who.title(), "roles": roles,
         "token_hash": _uid(TOKENS[who])},
        f"fx-acct-{who}",
    )
    result = lambda bench_id, new_id: _entry(  # noqa: E731
        "submit_result", "dana",
        {
            "benchmark_id": bench_id, "dataset_uid": ids["ds"], "model_cube_id": ids["model1"],
            "metrics": {"accuracy": 0.8125, "sensitivity": 0.75}, "sample_count": 160,
            "executed_hashes": {
                "prep": _uid("prep/m"), "model": _uid("model-one/m"),
                "metrics_cube": _uid("metrics/m"),
            },
            "model_approved_at": NOW, "result_approved_at": NOW,
        },
        new_id,
    )

    journal = [
        account("operator", ["PLATFORM_OPERATOR"]),
        account("carol", ["COMMITTEE", "MODEL_OWNER"]),
        account("dana", ["DATA_OWNER"]),
        account("mona", ["MODEL_OWNER"]),
        account("paula", ["MODEL_OWNER"]),
        _entry("register_cube", "carol", cube("prep", "PREPARATION"), ids["prep"]),
        _entry("register_cube", "carol", cube("metrics", "METRICS"), ids["metrics"]),
        _entry("register_cube", "carol", cube("ref-model", "MODEL"), ids["ref"]),
        _entry("register_cube", "mona", cube("model-one", "MODEL"), ids["model1"]),
        _entry("register_cube", "mona", cube("model-two", "MODEL"), ids["model2"]),
        _entry("register_benchmark", "carol",
               bench("fixture public bench", {"mode": "PUBLIC", "show_per_site": True}),
               ids["bench"]),
        _entry("activate_benchmark", "operator", {"benchmark_id": ids["bench"]}, "fx-x1"),
        _entry("register_benchmark", "carol",
               bench("fixture private bench", {"mode": "PRIVATE", "show_per_site": False}),
               ids["bench_private"]),
        _entry("activate_benchmark", "operator", {"benchmark_id": ids["bench_private"]}, "fx-x2"),
        _entry("register_dataset", "dana",
               {"generated_uid": ids["ds"], "name": "fixture site",
                "benchmark_prep_cube": ids["prep"], "sample_count": 160,
                "statistics": {"n": 160.0, "positive_fraction": 0.5}},
               "fx-x3"),
        _entry("request_association", "dana",
               {"benchmark_id": ids["bench"], "subject": ids["ds"], "subject_kind": "DATASET"},
               "fx-assoc-ds"),
        _entry("decide_association", "carol",
               {"association_id": "fx-assoc-ds", "decision": "approve"}, "fx-x4"),
        _entry("request_association", "mona",
               {"benchmark_id": ids["bench"], "subject": ids["model1"], "subject_kind": "MODEL"},
               "fx-assoc-m1"),
        _entry("decide_association", "carol",
               {"association_id": "fx-assoc-m1", "decision": "approve"}, "fx-x5"),
        result(ids["bench"], "fx-result-pub"),
        _entry("request_association", "dana",
               {"benchmark_id": ids["bench_private"], "subject": ids["ds"],
                "subject_kind": "DATASET"},
               "fx-assoc-ds2"),
        _entry("decide_association", "carol",
               {"association_id": "fx-assoc-ds2", "decision": "approve"}, "fx-x6"),
        _entry("request_association", "mona",
               {"benchmark_id": ids["bench_private"], "subject": ids["model1"],
                "subject_kind": "MODEL"},
               "fx-assoc-m2"),
        _entry("decide_association", "carol",
               {"association_id": "fx-assoc-m2", "decision": "approve"}, "fx-x7"),
        result(ids["bench_private"], "fx-result-priv"),
        # the decision target: model-two's association stays REQUESTED
        _entry("request_association", "mona",
               {"benchmark_id": ids["bench"], "subject": ids["model2"], "subject_kind": "MODEL"},
               ids["queue_assoc"]),
    ]
    return journal, ids


_TS_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


def normalize(value, key=None):
    """Replace timestamps and timestamp-dependent digests for comparison."""
    if isinstance(value, dict):
        return {k: normalize(v, k) for k, v in sorted(value.items())}
    if isinstance(value, list):
        return [normalize(v, key) for v in value]
    if isinstance(value, str):
        if _TS_RE.match(value):
            return "<TS>"
        if key in ("prev_hash", "entry_hash"):
            return "<HASH>"
    return value


def boot_server(journal: list[dict], tmp: Path, name: str) -> LiveServer:
    data_dir = tmp / name
    data_dir.mkdir()
    state = replay_journal(journal)
    (data_dir / "store.json").write_text(
        json.dumps({"format": STORE_FORMAT, "state": state_to_json(state), "journal": journal})
    )
    return LiveServer(data_dir=data_dir)


def main() -> None:
    journal, ids = setup_journal()
    out_path = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "recorded_server.json"
    with tempfile.TemporaryDirectory() as tmp_str:
        tmp = Path(tmp_str)
        server_cli = boot_server(journal, tmp, "cli")
        server_dash = boot_server(journal, tmp, "dash")
        try:
            carol_cli = ServerClient(
                server_cli.url, TOKENS["carol"],
                transport=RecordingTransport(httpx.HTTPTransport()),
            )
            # read-only payloads the snapshot tests replay
            queue_payload = carol_cli.list_associations(state="REQUESTED")
            results_committee = carol_cli.get_results(ids["bench"])
            paula = ServerClient(server_cli.url, TOKENS["paula"])
            results_private_empty = paula.get_results(ids["bench_private"])
            results_public_viewer = paula.get_results(ids["bench"])

            # CLI path on server A
            carol_cli.decide_association(ids["queue_assoc"], "approve")
            cli_requests = carol_cli._http._transport.records  # type: ignore[attr-defined]
            decision_requests = [
                r for r in cli_requests if r["url"].endswith("/decision")
            ]
            assert len(decision_requests) == 1
            cli_request = {
                "method": decision_requests[0]["method"],
                "path": "/api/v1/associations/" + ids["queue_assoc"] + "/decision",
                "body": decision_requests[0]["request_body"].decode(),
            }

            # dashboard-shaped request on server B (what ApiClient constructs)
            dash_request = {
                "method": "POST",
                "path": f"/api/v1/associations/{ids['queue_assoc']}/decision",
                "body": json.dumps({"decision": "approve"}, separators=(",", ":")),  # JSON.stringify shape
            }
            response = httpx.post(
                server_dash.url + dash_request["path"],
                content=dash_request["body"],
                headers={
                    "Authorization": f"Bearer {TOKENS['carol']}",
                    "Content-Type": "application/json",
                },
            )
            response.raise_for_status()

            state_cli = normalize(state_to_json(server_cli.store.state))
            state_dash = normalize(state_to_json(server_dash.store.state))
            parity = state_cli == state_dash
            assert parity, "dashboard and CLI decisions diverged"

            fixture = {
                "generated_note": "regenerate with: python3 scripts/record_fixtures.py",
                "queue_association_id": ids["queue_assoc"],
                "queue_payload": queue_payload,
                "results_committee": results_committee,
                "results_private_empty": results_private_empty,
                "results_public_viewer": results_public_viewer,
                "cli_request": cli_request,
                "dashboard_request": dash_request,
                "parity": parity,
                "normalized_state": state_cli,
            }
            out_path.parent.mkdir(parents=True, exist_ok=True)
            out_path.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
            print(f"parity: {parity}; fixture written to {out_path}")
        finally:
            server_cli.stop()
            server_dash.stop()


if __name__ == "__main__":
    main()
