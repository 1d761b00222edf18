"""In-process server harness: accounts, tokens, and a canned workflow."""

from __future__ import annotations

from fastapi.testclient import TestClient

from fedeval.registry import hash_bytes
from fedeval.server import Store, create_app
from fedeval.server.app import bootstrap_operator

OPERATOR_TOKEN = "operator-token-1"
TOKENS = {
    "operator": OPERATOR_TOKEN,
    "carol": "carol-token-1",  # committee (also model owner: owns the reference model)
    "dana": "dana-token-11",  # data owner
    "dave": "dave-token-11",  # second data owner
    "mona": "mona-token-11",  # model owner
    "paula": "paula-token-1",  # unprivileged-ish viewer (model owner with no assets)
}

ROLES = {
    "carol": ["COMMITTEE", "MODEL_OWNER"],
    "dana": ["DATA_OWNER"],
    "dave": ["DATA_OWNER"],
    "mona": ["MODEL_OWNER"],
    "paula": ["MODEL_OWNER"],
}


def uid_of(text: str) -> str:
    return str(hash_bytes(text.encode()))


class Harness:
    def __init__(self, data_dir=None):
        self.store = Store(data_dir)
        self.app = create_app(self.store)
        self.http = TestClient(self.app)
        bootstrap_operator(self.store, OPERATOR_TOKEN)

    def call(self, who: str, method: str, path: str, json=None, token=None, **kw):
        headers = {}
        token = token if token is not None else TOKENS.get(who)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return self.http.request(method, f"/api/v1{path}", json=json, headers=headers, **kw)

    def ok(self, who: str, method: str, path: str, json=None, **kw):
        response = self.call(who, method, path, json=json, **kw)
        assert response.status_code < 300, (path, response.status_code, response.text)
        return response.json()

    def err(self, who: str, method: str, path: str, json=None, **kw) -> tuple[int, str]:
        response = self.call(who, method, path, json=json, **kw)
        assert response.status_code >= 400, (path, response.status_code, response.text)
        return response.status_code, response.json()["error"]["code"]

    # -- setup shortcuts -----------------------------------------------------

    def create_standard_accounts(self):
        for name, roles in ROLES.items():
            self.ok(
                "operator",
                "POST",
                "/accounts",
                {"id": name, "display_name": name.title(), "roles": roles, "token": TOKENS[name]},
            )

    def register_cube(self, who: str, name: str, kind: str, **overrides) -> str:
        payload = {
            "name": name,
            "kind": kind,
            "manifest_uid": uid_of(f"{name}/manifest"),
            "image_ref": f"example.org/{name}:1",
            "image_uid": uid_of(f"{name}/image"),
            "extra_files": [],
            "download_urls": {"manifest": f"https://assets.example.org/{name}/cube.yaml"},
        }
        payload.update(overrides)
        return self.ok(who, "POST", "/cubes", payload)["id"]

    def register_standard_bundle(self) -> dict[str, str]:
        ids = {
            "prep": self.register_cube("carol", "std-prep", "PREPARATION"),
            "metrics": self.register_cube("carol", "std-metrics", "METRICS"),
            "ref_model": self.register_cube("carol", "std-ref-model", "MODEL"),
        }
        return ids

    def register_benchmark(self, cubes: dict[str, str], **overrides) -> str:
        payload = {
            "name": "std-bench",
            "description": "standard test benchmark",
            "docs_url": "https://example.org/docs",
            "preparation_cube": cubes["prep"],
            "metrics_cube": cubes["metrics"],
            "reference_model_cube": cubes["ref_model"],
            "metric_specs": [
                {"name": "accuracy", "range": [0.0, 1.0], "decomposable": True},
                {"name": "sensitivity", "range": [0.0, 1.0]},
            ],
            "visibility": "OPEN",
            "release_policy": {"mode": "PUBLIC", "show_per_site": True},
        }
        payload.update(overrides)
        return self.ok("carol", "POST", "/benchmarks", payload)["id"]

    def operational_benchmark(self, **overrides) -> tuple[str, dict[str, str]]:
        cubes = self.register_standard_bundle()
        bench_id = self.register_benchmark(cubes, **overrides)
        self.ok("operator", "POST", f"/benchmarks/{bench_id}/activate")
        return bench_id, cubes

    def register_dataset(self, who: str, name: str, sample_count: int, prep_cube: str) -> str:
        uid = uid_of(f"dataset/{name}")
        self.ok(
            who,
            "POST",
            "/datasets",
            {
                "generated_uid": uid,
                "name": name,
                "benchmark_prep_cube": prep_cube,
                "sample_count": sample_count,
                "statistics": {"n": float(sample_count)},
            },
        )
        return uid

    def associate(self, who: str, bench_id: str, subject: str, kind: str) -> str:
        return self.ok(
            who,
            "POST",
            "/associations",
            {"benchmark_id": bench_id, "subject": subject, "subject_kind": kind},
        )["id"]

    def approve(self, assoc_id: str, decision: str = "approve"):
        return self.ok("carol", "POST", f"/associations/{assoc_id}/decision", {"decision": decision})

    def submit_result(self, who: str, bench_id: str, dataset_uid: str, model_id: str,
                      cubes: dict[str, str], metrics: dict, sample_count: int):
        state = self.store.state
        payload = {
            "benchmark_id": bench_id,
            "dataset_uid": dataset_uid,
            "model_cube_id": model_id,
            "metrics": metrics,
            "sample_count": sample_count,
            "executed_hashes": {
                "prep": str(state.cubes[cubes["prep"]].manifest_uid),
                "model": str(state.cubes[model_id].manifest_uid),
                "metrics_cube": str(state.cubes[cubes["metrics"]].manifest_uid),
            },
            "model_approved_at": "2026-08-01T10:00:00Z",
            "result_approved_at": "2026-08-01T10:05:00Z",
        }
        return self.ok(who, "POST", "/results", payload)
