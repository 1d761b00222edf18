"""Coordination server API: workflows, error codes, release filtering."""

import pytest

from server_harness import Harness, TOKENS, uid_of


@pytest.fixture
def h():
    harness = Harness()
    harness.create_standard_accounts()
    return harness


def test_missing_or_bad_token_is_401(h):
    assert h.call("nobody", "GET", "/benchmarks", token="").status_code == 401
    assert h.call("nobody", "GET", "/benchmarks", token="wrong-token").status_code == 401


def test_benchmark_registration_flow(h):
    cubes = h.register_standard_bundle()
    bench_id = h.register_benchmark(cubes)
    body = h.ok("carol", "GET", f"/benchmarks/{bench_id}")
    assert body["state"] == "DRAFT"
    assert body["committee_id"] == "carol"
    # audit picked up every registration
    actions = [e["action"] for e in h.ok("carol", "GET", "/audit")["events"]]
    assert actions.count("CUBE_REGISTERED") == 3
    assert actions.count("BENCHMARK_REGISTERED") == 1


def test_model_owner_cannot_register_benchmark(h):
    cubes = h.register_standard_bundle()
    payload = {
        "name": "x", "docs_url": "https://d", "preparation_cube": cubes["prep"],
        "metrics_cube": cubes["metrics"], "reference_model_cube": cubes["ref_model"],
        "metric_specs": [{"name": "accuracy", "range": [0, 1]}],
    }
    status, code = h.err("mona", "POST", "/benchmarks", payload)
    assert (status, code) == (403, "FORBIDDEN")


def test_dangling_metrics_cube_is_invalid_bundle(h):
    cubes = h.register_standard_bundle()
    cubes["metrics"] = "no-such-cube"
    payload = {
        "name": "x", "docs_url": "https://d", "preparation_cube": cubes["prep"],
        "metrics_cube": cubes["metrics"], "reference_model_cube": cubes["ref_model"],
        "metric_specs": [{"name": "accuracy", "range": [0, 1]}],
    }
    status, code = h.err("carol", "POST", "/benchmarks", payload)
    assert (status, code) == (422, "INVALID_BUNDLE")


def test_lifecycle_transitions(h):
    cubes = h.register_standard_bundle()
    bench_id = h.register_benchmark(cubes)
    status, code = h.err("carol", "POST", f"/benchmarks/{bench_id}/activate")
    assert (status, code) == (403, "FORBIDDEN")
    assert h.ok("operator", "POST", f"/benchmarks/{bench_id}/activate")["state"] == "OPERATIONAL"
    assert h.ok("operator", "POST", f"/benchmarks/{bench_id}/retire")["state"] == "RETIRED"
    status, code = h.err("operator", "POST", f"/benchmarks/{bench_id}/activate")
    assert (status, code) == (409, "ILLEGAL_TRANSITION")


def test_cube_registration_rules(h):
    # model owner registers MODEL
    model_id = h.register_cube("mona", "mona-model", "MODEL")
    assert h.ok("mona", "GET", f"/cubes/{model_id}")["owner_id"] == "mona"
    # committee registers METRICS
    h.register_cube("carol", "extra-metrics", "METRICS")
    # data owner cannot register cubes at all
    status, code = h.err("dana", "POST", "/cubes", {
        "name": "d", "kind": "MODEL", "manifest_uid": uid_of("m"),
        "image_ref": "r", "image_uid": uid_of("i"),
    })
    assert (status, code) == (403, "FORBIDDEN")
    # committee cannot register MODEL kind without the MODEL_OWNER role
    status, code = h.err("operator", "POST", "/cubes", {
        "name": "d", "kind": "MODEL", "manifest_uid": uid_of("m"),
        "image_ref": "r", "image_uid": uid_of("i"),
    })
    assert (status, code) == (403, "FORBIDDEN")


def test_missing_image_hash_rejected(h):
    status, code = h.err("mona", "POST", "/cubes", {
        "name": "nohash", "kind": "MODEL", "manifest_uid": uid_of("m"), "image_ref": "r",
    })
    assert (status, code) == (422, "MISSING_HASH")


def test_dataset_registration_rules(h):
    cubes = h.register_standard_bundle()
    uid = h.register_dataset("dana", "site-a", 100, cubes["prep"])
    status, code = h.err("dana", "POST", "/datasets", {
        "generated_uid": uid, "name": "again", "benchmark_prep_cube": cubes["prep"],
        "sample_count": 5, "statistics": {},
    })
    assert (status, code) == (409, "DUPLICATE_UID")
    status, code = h.err("dana", "POST", "/datasets", {
        "generated_uid": uid_of("huge"), "name": "huge", "benchmark_prep_cube": cubes["prep"],
        "sample_count": 5, "statistics": {f"s{i}": float(i) for i in range(10_000)},
    })
    assert (status, code) == (422, "PAYLOAD_TOO_LARGE")
    status, code = h.err("mona", "POST", "/datasets", {
        "generated_uid": uid_of("not-yours"), "name": "x", "benchmark_prep_cube": cubes["prep"],
        "sample_count": 5, "statistics": {},
    })
    assert (status, code) == (403, "FORBIDDEN")


def test_association_flow_and_rules(h):
    bench_id, cubes = h.operational_benchmark()
    ds = h.register_dataset("dana", "site-a", 100, cubes["prep"])
    assoc = h.associate("dana", bench_id, ds, "DATASET")
    # duplicate while REQUESTED
    status, code = h.err("dana", "POST", "/associations",
                         {"benchmark_id": bench_id, "subject": ds, "subject_kind": "DATASET"})
    assert (status, code) == (409, "DUPLICATE_ASSOCIATION")
    # non-committee cannot decide
    status, code = h.err("mona", "POST", f"/associations/{assoc}/decision", {"decision": "approve"})
    assert (status, code) == (403, "FORBIDDEN")
    assert h.approve(assoc)["state"] == "APPROVED"
    # deciding twice is illegal
    status, code = h.err("carol", "POST", f"/associations/{assoc}/decision", {"decision": "reject"})
    assert (status, code) == (409, "ILLEGAL_TRANSITION")
    # rejected association can be re-requested
    model_id = h.register_cube("mona", "mona-model", "MODEL")
    a2 = h.associate("mona", bench_id, model_id, "MODEL")
    h.approve(a2, "reject")
    a3 = h.associate("mona", bench_id, model_id, "MODEL")
    assert a3 != a2


def test_closed_benchmark_allowlist(h):
    bench_id, cubes = h.operational_benchmark(
        name="closed-bench", visibility="CLOSED", allowlist=["dana", "carol"]
    )
    ds = h.register_dataset("dave", "dave-site", 10, cubes["prep"])
    status, code = h.err("dave", "POST", "/associations",
                         {"benchmark_id": bench_id, "subject": ds, "subject_kind": "DATASET"})
    assert (status, code) == (403, "NOT_ALLOWLISTED")
    ds2 = h.register_dataset("dana", "dana-site", 10, cubes["prep"])
    h.associate("dana", bench_id, ds2, "DATASET")


def test_association_on_draft_benchmark_rejected(h):
    cubes = h.register_standard_bundle()
    bench_id = h.register_benchmark(cubes)
    ds = h.register_dataset("dana", "site-a", 100, cubes["prep"])
    status, code = h.err("dana", "POST", "/associations",
                         {"benchmark_id": bench_id, "subject": ds, "subject_kind": "DATASET"})
    assert (status, code) == (409, "BENCHMARK_NOT_OPERATIONAL")


def _full_setup(h):
    """Operational benchmark + two approved models + approved dataset."""
    bench_id, cubes = h.operational_benchmark()
    ds = h.register_dataset("dana", "site-a", 100, cubes["prep"])
    h.approve(h.associate("dana", bench_id, ds, "DATASET"))
    model_a = h.register_cube("mona", "model-a", "MODEL")
    h.approve(h.associate("mona", bench_id, model_a, "MODEL"))
    h.approve(h.associate("carol", bench_id, cubes["ref_model"], "MODEL"))
    return bench_id, cubes, ds, model_a


def test_fetch_pending_and_results_flow(h):
    bench_id, cubes, ds, model_a = _full_setup(h)
    pending = h.ok("dana", "GET", f"/datasets/{ds}/pending")["tasks"]
    assert [(t["benchmark_id"], t["model_cube_id"]) for t in pending] == sorted(
        [(bench_id, model_a), (bench_id, cubes["ref_model"])]
    )
    descriptor = pending[0]
    assert descriptor["model_cube"]["manifest_uid"]
    assert descriptor["prep_cube"]["manifest_uid"]
    assert descriptor["metrics_cube"]["manifest_uid"]
    # another data owner may not peek
    status, code = h.err("dave", "GET", f"/datasets/{ds}/pending")
    assert (status, code) == (403, "FORBIDDEN")
    # unknown dataset
    status, code = h.err("dana", "GET", f"/datasets/{uid_of('nope')}/pending")
    assert (status, code) == (404, "UNKNOWN_DATASET")

    h.submit_result("dana", bench_id, ds, model_a, cubes, {"accuracy": 0.8}, 100)
    left = h.ok("dana", "GET", f"/datasets/{ds}/pending")["tasks"]
    assert [t["model_cube_id"] for t in left] == [cubes["ref_model"]]
    h.submit_result("dana", bench_id, ds, cubes["ref_model"], cubes, {"accuracy": 0.5}, 100)
    assert h.ok("dana", "GET", f"/datasets/{ds}/pending")["tasks"] == []


def test_submit_result_validations(h):
    bench_id, cubes, ds, model_a = _full_setup(h)
    state = h.store.state
    base = {
        "benchmark_id": bench_id,
        "dataset_uid": ds,
        "model_cube_id": model_a,
        "metrics": {"accuracy": 0.8},
        "sample_count": 100,
        "executed_hashes": {
            "prep": str(state.cubes[cubes["prep"]].manifest_uid),
            "model": str(state.cubes[model_a].manifest_uid),
            "metrics_cube": str(state.cubes[cubes["metrics"]].manifest_uid),
        },
        "model_approved_at": "2026-08-01T10:00:00Z",
        "result_approved_at": "2026-08-01T10:05:00Z",
    }
    # missing result approval timestamp
    broken = {k: v for k, v in base.items() if k != "result_approved_at"}
    status, code = h.err("dana", "POST", "/results", broken)
    assert (status, code) == (422, "INVALID_RESULT")
    # out-of-range metric
    status, code = h.err("dana", "POST", "/results", {**base, "metrics": {"accuracy": 1.3}})
    assert (status, code) == (422, "INVALID_RESULT")
    # tampered executed hash
    status, code = h.err("dana", "POST", "/results", {
        **base, "executed_hashes": {**base["executed_hashes"], "prep": uid_of("evil")},
    })
    assert (status, code) == (422, "INVALID_RESULT")
    # wrong owner
    status, code = h.err("dave", "POST", "/results", base)
    assert (status, code) == (403, "FORBIDDEN")
    # ok then duplicate
    h.ok("dana", "POST", "/results", base)
    status, code = h.err("dana", "POST", "/results", base)
    assert (status, code) == (409, "DUPLICATE_RESULT")


def test_results_release_filtering(h):
    bench_id, cubes, ds, model_a = _full_setup(h)
    h.submit_result("dana", bench_id, ds, model_a, cubes, {"accuracy": 0.8, "sensitivity": 0.7}, 100)
    h.submit_result("dana", bench_id, ds, cubes["ref_model"], cubes, {"accuracy": 0.5}, 100)

    # PUBLIC + show_per_site: everyone sees everything
    public_view = h.ok("paula", "GET", f"/benchmarks/{bench_id}/results")
    assert len(public_view["aggregates"]) == 2
    assert len(public_view["site_rows"]) == 2
    agg = {a["model_cube_id"]: a for a in public_view["aggregates"]}
    assert agg[model_a]["metrics"]["accuracy"]["value"] == 0.8
    assert agg[model_a]["metrics"]["accuracy"]["total_samples"] == 100

    # flip policy to PRIVATE via a new benchmark to check the empty view
    bench2, cubes2 = h.operational_benchmark(
        name="private-bench", release_policy={"mode": "PRIVATE", "show_per_site": False}
    )
    ds2 = h.register_dataset("dave", "dave-site", 50, cubes2["prep"])
    h.approve(h.associate("dave", bench2, ds2, "DATASET"))
    model_b = h.register_cube("mona", "model-b", "MODEL")
    h.approve(h.associate("mona", bench2, model_b, "MODEL"))
    h.submit_result("dave", bench2, ds2, model_b, cubes2, {"accuracy": 0.6}, 50)

    empty = h.ok("paula", "GET", f"/benchmarks/{bench2}/results")
    assert empty["aggregates"] == [] and empty["site_rows"] == []
    committee_view = h.ok("carol", "GET", f"/benchmarks/{bench2}/results")
    assert len(committee_view["aggregates"]) == 1 and len(committee_view["site_rows"]) == 1
    # the data owner keeps sight of their own rows even under PRIVATE
    dave_view = h.ok("dave", "GET", f"/benchmarks/{bench2}/results")
    assert dave_view["aggregates"] == []
    assert [r["dataset_uid"] for r in dave_view["site_rows"]] == [ds2]


def test_owner_scoped_results(h):
    bench_id, cubes, ds, model_a = _full_setup(h)
    # switch: build an OWNER_SCOPED benchmark
    bench2, cubes2 = h.operational_benchmark(
        name="scoped-bench", release_policy={"mode": "OWNER_SCOPED", "show_per_site": True}
    )
    ds2 = h.register_dataset("dave", "dave-scoped", 50, cubes2["prep"])
    h.approve(h.associate("dave", bench2, ds2, "DATASET"))
    model_m = h.register_cube("mona", "mona-scoped", "MODEL")
    h.approve(h.associate("mona", bench2, model_m, "MODEL"))
    h.approve(h.associate("carol", bench2, cubes2["ref_model"], "MODEL"))
    h.submit_result("dave", bench2, ds2, model_m, cubes2, {"accuracy": 0.9}, 50)
    h.submit_result("dave", bench2, ds2, cubes2["ref_model"], cubes2, {"accuracy": 0.4}, 50)

    mona_view = h.ok("mona", "GET", f"/benchmarks/{bench2}/results")
    assert {a["model_cube_id"] for a in mona_view["aggregates"]} == {model_m, cubes2["ref_model"]}
    assert {r["model_cube_id"] for r in mona_view["site_rows"]} == {model_m}
    # paula owns nothing here: nothing visible
    paula_view = h.ok("paula", "GET", f"/benchmarks/{bench2}/results")
    assert paula_view["aggregates"] == [] and paula_view["site_rows"] == []


def test_audit_endpoint_pagination_and_chain(h):
    h.register_standard_bundle()
    events = h.ok("carol", "GET", "/audit")["events"]
    assert [e["seq"] for e in events] == list(range(len(events)))
    tail = h.ok("carol", "GET", "/audit", params={"from_seq": len(events) - 1})["events"]
    assert len(tail) == 1 and tail[0]["seq"] == len(events) - 1
    # chain property: prev_hash links
    for prev, cur in zip(events, events[1:]):
        assert cur["prev_hash"] == prev["entry_hash"]


def test_association_queue_visibility(h):
    bench_id, cubes = h.operational_benchmark()
    ds = h.register_dataset("dana", "site-a", 100, cubes["prep"])
    h.associate("dana", bench_id, ds, "DATASET")
    model_id = h.register_cube("mona", "queue-model", "MODEL")
    h.associate("mona", bench_id, model_id, "MODEL")

    queue = h.ok("carol", "GET", "/associations", params={"state": "REQUESTED"})["associations"]
    assert len(queue) == 2
    kinds = {item["subject_kind"]: item for item in queue}
    assert kinds["DATASET"]["pinned_hashes"]["generated_uid"] == ds
    assert kinds["MODEL"]["pinned_hashes"]["manifest_uid"]
    assert kinds["MODEL"]["benchmark_name"] == "std-bench"
    # requester sees own; unrelated viewer sees none
    assert len(h.ok("mona", "GET", "/associations")["associations"]) == 1
    assert h.ok("paula", "GET", "/associations")["associations"] == []


def test_whoami(h):
    me = h.ok("dana", "GET", "/accounts/me")
    assert me == {"id": "dana", "display_name": "Dana", "roles": ["DATA_OWNER"]}


def test_account_creation_rules(h):
    status, code = h.err("carol", "POST", "/accounts",
                         {"id": "x", "roles": ["DATA_OWNER"], "token": "x-token-123"})
    assert (status, code) == (403, "FORBIDDEN")
    status, code = h.err("operator", "POST", "/accounts",
                         {"id": "dana", "roles": ["DATA_OWNER"], "token": "other-token-1"})
    assert (status, code) == (409, "DUPLICATE_ACCOUNT")
    status, code = h.err("operator", "POST", "/accounts",
                         {"id": "dup", "roles": ["DATA_OWNER"], "token": TOKENS["dana"]})
    assert (status, code) == (409, "DUPLICATE_TOKEN")
