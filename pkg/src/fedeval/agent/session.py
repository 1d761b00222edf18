"""Agent command implementations.

The human gates live here. Each gate renders a review sheet, asks the
decision provider, and logs an ApprovalRecord whose shown_digest is the
hash of that exact sheet. Execution re-derives the sheet and refuses to
run unless a matching APPROVE record exists, so no command sequence can
reach the backend without the operator having seen the real hashes, nor
upload without having seen the real payload.
"""

from __future__ import annotations

import getpass
import json
import shutil
from pathlib import Path
from typing import Callable

from fedeval.registry import ContentUid, DomainError, hash_bytes, hash_tree_path
from fedeval.registry.model import AuditAction, BenchmarkState
from fedeval.registry.timestamps import format_utc, utc_now
from fedeval.runtime import (
    CubeAssets,
    CubeManifest,
    ExecutionBackend,
    ProcessBackend,
    SandboxPolicy,
    TaskOutcome,
    TaskStatus,
    VerifiedCube,
    load_restricted_yaml,
    run_task,
    verify_cube,
)

from .approvals import ApprovalKind, ApprovalRecord
from .client import ServerClient
from .cubeio import download_cube, pinned_from_descriptor, publish_cube_dir
from .home import AgentHome

# (kind, sheet text) -> approve? Interactive by default; tests inject.
DecisionProvider = Callable[[ApprovalKind, str], bool]

# The platform pipeline contract every benchmark's cubes implement.
MODEL_TASK = "infer"  # data -> predictions
METRICS_TASK = "evaluate"  # predictions + data -> results
PREP_TASKS = ("prepare", "sanity_check", "statistics")


def task_id_for(benchmark_id: str, dataset_uid: str, model_cube_id: str) -> str:
    return hash_bytes(f"{benchmark_id}|{dataset_uid}|{model_cube_id}".encode())[:12]


def model_review_sheet(task: dict) -> str:
    model = task["model_cube"]
    lines = [
        "MODEL EXECUTION REVIEW",
        f"benchmark: {task['benchmark_id']} ({task['benchmark']['name']})",
        f"dataset_uid: {task['dataset_uid']}",
        f"model_cube: {model['id']} ({model['name']})",
        f"model_owner: {model['owner_id']}",
        f"image_ref: {model['image_ref']}",
        f"manifest_uid: {model['manifest_uid']}",
        f"image_uid: {model['image_uid']}",
        f"parameters_uid: {model.get('parameters_uid') or '-'}",
        *(f"extra: {e['path']} {e['uid']}" for e in model.get("extra_files", [])),
        f"prep_manifest_uid: {task['prep_cube']['manifest_uid']}",
        f"metrics_manifest_uid: {task['metrics_cube']['manifest_uid']}",
    ]
    return "\n".join(lines) + "\n"


def payload_sheet(title: str, payload: dict) -> str:
    return f"{title}\n{json.dumps(payload, indent=2, sort_keys=True)}\n"


class AgentSession:
    def __init__(
        self,
        home: AgentHome,
        client: ServerClient,
        decide: DecisionProvider,
        backend: ExecutionBackend | None = None,
        *,
        insecure_allow_network: bool = False,
        policy: SandboxPolicy | None = None,
        operator: str | None = None,
    ):
        self.home = home
        self.client = client
        self.decide = decide
        self.backend = backend or ProcessBackend()
        self.insecure_allow_network = insecure_allow_network
        self.policy = policy or SandboxPolicy()
        try:
            self.operator = operator or getpass.getuser()
        except OSError:  # no passwd entry in minimal containers
            self.operator = operator or "operator"

    # -- internals -------------------------------------------------------------

    def _run(self, cube: VerifiedCube, task: str, inputs: dict, label: str) -> tuple[TaskOutcome, Path]:
        workspace = self.home.fresh_workspace(label)
        outcome = run_task(
            cube,
            task,
            inputs,
            workspace,
            self.policy,
            self.backend,
            insecure_allow_network=self.insecure_allow_network,
        )
        return outcome, workspace

    def _verified_cube(self, descriptor: dict, dest: Path) -> VerifiedCube:
        """Download (if needed) and verify one cube; never returns unverified."""
        assets = CubeAssets(dest)
        if not assets.manifest_path.exists():
            download_cube(self.client, descriptor, dest)
        return verify_cube(assets, pinned_from_descriptor(descriptor)).require()

    def _committee_cube(self, descriptor: dict) -> VerifiedCube:
        return self._verified_cube(descriptor, self.home.asset_dir(descriptor["manifest_uid"]))

    @staticmethod
    def _require_contract(manifest: CubeManifest, task: str, inputs: set[str], outputs: set[str]) -> None:
        spec = manifest.tasks.get(task)
        if spec is None or set(spec.inputs) != inputs or set(spec.outputs) != outputs:
            raise DomainError(
                "VALIDATION",
                f"cube {manifest.name!r} does not implement the {task} contract "
                f"({sorted(inputs)} -> {sorted(outputs)})",
            )

    # -- dataset preparation ------------------------------------------------------

    def dataset_prepare(self, raw_path: Path | str, benchmark_id: str, out_path: Path | str,
                        name: str | None = None) -> dict:
        raw_path = Path(raw_path)
        out_path = Path(out_path)
        benchmark = self.client.get_benchmark(benchmark_id)
        if benchmark["state"] != BenchmarkState.OPERATIONAL.value:
            raise DomainError(
                "BENCHMARK_NOT_OPERATIONAL", f"benchmark is {benchmark['state']}"
            )
        prep_descriptor = self.client.get_cube(benchmark["preparation_cube"])
        prep = self._committee_cube(prep_descriptor)
        self._require_contract(prep.manifest, "prepare", {"raw"}, {"prepared"})

        outcome, workspace = self._run(prep, "prepare", {"raw": raw_path}, "prepare")
        if outcome.status is not TaskStatus.OK:
            raise DomainError(
                "PREP_FAILED", f"prepare exited {outcome.exit_code}: {outcome.log_excerpt[-400:]}"
            )
        prepared_src = workspace / "outputs" / "prepared"

        sanity, _ = self._run(prep, "sanity_check", {"prepared": prepared_src}, "sanity")
        if sanity.status is not TaskStatus.OK:
            raise DomainError(
                "SANITY_CHECK_FAILED",
                f"sanity_check exited {sanity.exit_code}: {sanity.log_excerpt[-400:]}",
            )

        stats_outcome, stats_ws = self._run(prep, "statistics", {"prepared": prepared_src}, "stats")
        if stats_outcome.status is not TaskStatus.OK:
            raise DomainError(
                "PREP_FAILED", f"statistics exited {stats_outcome.exit_code}"
            )
        statistics = load_restricted_yaml((stats_ws / "outputs" / "statistics").read_text("utf-8"))
        if not isinstance(statistics, dict):
            raise DomainError("PREP_FAILED", "statistics task produced no mapping")

        if out_path.exists() and any(out_path.iterdir()):
            raise DomainError("VALIDATION", f"output path {out_path} is not empty")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        if out_path.exists():
            out_path.rmdir()
        shutil.copytree(prepared_src, out_path)
        generated_uid = hash_tree_path(out_path)

        meta = {
            "name": name or out_path.name,
            "benchmark_id": benchmark_id,
            "prep_cube_id": prep_descriptor["id"],
            "raw_path": str(raw_path.resolve()),
            "prepared_path": str(out_path.resolve()),
            "generated_uid": str(generated_uid),
            "statistics": {k: v for k, v in statistics.items() if isinstance(v, (int, float))},
            "registration_state": "PREPARED",
        }
        self.home.save_dataset(meta)
        self.home.approvals.record_event(
            AuditAction.DATASET_PREPARED, self.operator, (meta["name"], str(generated_uid)), utc_now()
        )
        return meta

    def dataset_register(self, name: str) -> dict:
        meta = self.home.load_dataset(name)
        if meta is None:
            raise DomainError("VALIDATION", f"no local dataset named {name!r}")
        if meta["registration_state"] == "REGISTERED":
            return meta

        payload = {
            "generated_uid": meta["generated_uid"],
            "name": meta["name"],
            "benchmark_prep_cube": meta["prep_cube_id"],
            "sample_count": int(meta["statistics"].get("n", 0)),
            "statistics": meta["statistics"],
        }
        sheet = payload_sheet("DATASET STATISTICS UPLOAD", payload)
        digest = hash_bytes(sheet.encode("utf-8"))
        decision = self.home.approvals.find_decision(ApprovalKind.STATS_UPLOAD, digest)
        if decision is None or not decision.approved:
            approved = self.decide(ApprovalKind.STATS_UPLOAD, sheet)
            self.home.approvals.record_approval(
                ApprovalRecord(
                    what=ApprovalKind.STATS_UPLOAD,
                    subject_ids=(meta["generated_uid"],),
                    decision="APPROVE" if approved else "REJECT",
                    operator=self.operator,
                    shown_digest=digest,
                    timestamp=utc_now(),
                )
            )
            if not approved:
                raise DomainError("NOT_APPROVED", "operator withheld the statistics upload")
            meta["registration_state"] = "STATS_APPROVED"
            self.home.save_dataset(meta)

        self.client.register_dataset(payload)
        self.client.request_association(meta["benchmark_id"], meta["generated_uid"], "DATASET")
        meta["registration_state"] = "REGISTERED"
        self.home.save_dataset(meta)
        self.home.approvals.record_event(
            AuditAction.DATASET_REGISTERED, self.operator, (meta["generated_uid"],), utc_now()
        )
        return meta

    # -- evaluation tasks -----------------------------------------------------------

    def poll(self, dataset_name: str, wait: float = 0.0) -> list[dict]:
        meta = self.home.load_dataset(dataset_name)
        if meta is None:
            raise DomainError("VALIDATION", f"no local dataset named {dataset_name!r}")
        if meta["registration_state"] != "REGISTERED":
            raise DomainError("VALIDATION", f"dataset {dataset_name!r} is not registered yet")
        tasks = self.client.fetch_pending(meta["generated_uid"], wait=wait)
        for task in tasks:
            task["task_id"] = task_id_for(
                task["benchmark_id"], task["dataset_uid"], task["model_cube_id"]
            )
            task["dataset_name"] = dataset_name
        self.home.save_pending(tasks)
        return [t for t in tasks if t["task_id"] not in self.home.suppressed_tasks()]

    def _task(self, task_id: str) -> dict:
        for task in self.home.load_pending():
            if task["task_id"] == task_id:
                return task
        raise DomainError("VALIDATION", f"no cached pending task {task_id!r}; run `tasks list`")

    def approve_model(self, task_id: str) -> ApprovalRecord:
        task = self._task(task_id)
        model = task["model_cube"]
        quarantine = self.home.quarantine_dir(model["manifest_uid"])
        if not (quarantine / "cube.yaml").exists() and not self.home.asset_dir(model["manifest_uid"]).exists():
            download_cube(self.client, model, quarantine)
        # Verification before any approval is possible at all.
        asset_dir = self.home.asset_dir(model["manifest_uid"])
        where = asset_dir if asset_dir.exists() else quarantine
        verify_cube(CubeAssets(where), pinned_from_descriptor(model)).require()

        sheet = model_review_sheet(task)
        digest = hash_bytes(sheet.encode("utf-8"))
        approved = self.decide(ApprovalKind.MODEL_EXECUTION, sheet)
        record = ApprovalRecord(
            what=ApprovalKind.MODEL_EXECUTION,
            subject_ids=(task["benchmark_id"], task["dataset_uid"], task["model_cube_id"]),
            decision="APPROVE" if approved else "REJECT",
            operator=self.operator,
            shown_digest=digest,
            timestamp=utc_now(),
        )
        self.home.approvals.record_approval(record)
        if approved:
            if not asset_dir.exists():
                self.home.promote_quarantined(model["manifest_uid"])
        else:
            self.home.suppress_task(task_id)
        return record

    def run_evaluation(self, task_id: str) -> dict:
        task = self._task(task_id)
        sheet = model_review_sheet(task)
        digest = hash_bytes(sheet.encode("utf-8"))
        decision = self.home.approvals.find_decision(ApprovalKind.MODEL_EXECUTION, digest)
        if decision is None or not decision.approved:
            raise DomainError(
                "NO_APPROVAL",
                "no operator approval matches this task's hash set; run `tasks approve` first",
            )

        meta = self.home.find_dataset_by_uid(task["dataset_uid"])
        if meta is None:
            raise DomainError("VALIDATION", f"no local dataset with uid {task['dataset_uid']}")
        prepared = Path(meta["prepared_path"])

        # Re-verify everything at run time; approval alone never suffices.
        model_cube = self._verified_cube(
            task["model_cube"], self.home.asset_dir(task["model_cube"]["manifest_uid"])
        )
        prep_cube = self._committee_cube(task["prep_cube"])
        metrics_cube = self._committee_cube(task["metrics_cube"])
        self._require_contract(model_cube.manifest, MODEL_TASK, {"data"}, {"predictions"})
        self._require_contract(metrics_cube.manifest, METRICS_TASK, {"predictions", "data"}, {"results"})

        infer, infer_ws = self._run(model_cube, MODEL_TASK, {"data": prepared}, f"infer-{task_id}")
        if infer.status is not TaskStatus.OK:
            raise DomainError(
                "TASK_FAILED", f"stage infer exited {infer.exit_code}: {infer.log_excerpt[-400:]}"
            )
        predictions = infer_ws / "outputs" / "predictions"

        evaluate, eval_ws = self._run(
            metrics_cube,
            METRICS_TASK,
            {"predictions": predictions, "data": prepared},
            f"eval-{task_id}",
        )
        if evaluate.status is not TaskStatus.OK:
            raise DomainError(
                "TASK_FAILED",
                f"stage evaluate exited {evaluate.exit_code}: {evaluate.log_excerpt[-400:]}",
            )
        results = load_restricted_yaml((eval_ws / "outputs" / "results").read_text("utf-8"))
        if not isinstance(results, dict) or "n" not in results:
            raise DomainError("TASK_FAILED", "metrics cube produced no usable results mapping")

        metrics = {
            k: float(v)
            for k, v in results.items()
            if k != "n" and isinstance(v, (int, float)) and not isinstance(v, bool)
        }
        draft = {
            "task_id": task_id,
            "benchmark_id": task["benchmark_id"],
            "dataset_uid": task["dataset_uid"],
            "model_cube_id": task["model_cube_id"],
            "model_sheet_digest": str(digest),
            "metrics": metrics,
            "metric_notes": {
                k: v for k, v in results.items() if isinstance(v, str)
            },
            "sample_count": int(results["n"]),
            "executed_hashes": {
                "prep": str(prep_cube.pinned.manifest_uid),
                "model": str(model_cube.pinned.manifest_uid),
                "metrics_cube": str(metrics_cube.pinned.manifest_uid),
            },
            "model_approved_at": format_utc(decision.timestamp),
            "state": "DRAFT",
        }
        self.home.save_draft(task_id, draft)
        self.home.approvals.record_event(
            AuditAction.EVALUATION_EXECUTED,
            self.operator,
            (task["benchmark_id"], task["dataset_uid"], task["model_cube_id"]),
            utc_now(),
        )
        return draft

    def submit(self, task_id: str) -> dict:
        draft = self.home.load_draft(task_id)
        if draft is None:
            raise DomainError("VALIDATION", f"no draft result for task {task_id!r}; run it first")
        if draft.get("state") == "UPLOADED":
            return draft

        # The model-execution approval must still be the standing decision:
        # an operator who rejected the model after the run blocks the upload.
        model_decision = self.home.approvals.find_decision(
            ApprovalKind.MODEL_EXECUTION, ContentUid(draft["model_sheet_digest"])
        )
        if model_decision is None or not model_decision.approved:
            raise DomainError(
                "NO_APPROVAL",
                "the model-execution approval behind this draft has been withdrawn",
            )

        payload = {
            "benchmark_id": draft["benchmark_id"],
            "dataset_uid": draft["dataset_uid"],
            "model_cube_id": draft["model_cube_id"],
            "metrics": draft["metrics"],
            "sample_count": draft["sample_count"],
            "executed_hashes": draft["executed_hashes"],
            "model_approved_at": draft["model_approved_at"],
        }
        sheet = payload_sheet("RESULT UPLOAD", payload)
        digest = hash_bytes(sheet.encode("utf-8"))
        approved = self.decide(ApprovalKind.RESULT_UPLOAD, sheet)
        now = utc_now()
        self.home.approvals.record_approval(
            ApprovalRecord(
                what=ApprovalKind.RESULT_UPLOAD,
                subject_ids=(draft["benchmark_id"], draft["dataset_uid"], draft["model_cube_id"]),
                decision="APPROVE" if approved else "REJECT",
                operator=self.operator,
                shown_digest=digest,
                timestamp=now,
            )
        )
        if not approved:
            raise DomainError("NOT_APPROVED", "operator withheld the result upload")

        payload["result_approved_at"] = format_utc(now)
        response = self.client.submit_result(payload)
        draft["state"] = "UPLOADED"
        draft["server_result_id"] = response["id"]
        draft["result_approved_at"] = payload["result_approved_at"]
        self.home.save_draft(task_id, draft)
        self.home.approvals.record_event(
            AuditAction.RESULT_UPLOADED,
            self.operator,
            (response["id"], draft["benchmark_id"], draft["dataset_uid"], draft["model_cube_id"]),
            utc_now(),
        )
        return draft

    # -- audit ---------------------------------------------------------------------

    def audit_listing(self) -> tuple[str, int]:
        """Human-readable chain listing; raises CHAIN_CORRUPT(seq) if broken."""
        self.home.approvals.verify()
        lines = []
        for entry in self.home.approvals.entries():
            what = f" {entry['what']}={entry['decision']}" if "what" in entry else ""
            lines.append(
                f"[{entry['seq']:04d}] {entry['timestamp']} {entry['actor']} "
                f"{entry['action']}{what} subjects={','.join(entry['subject_ids'])}"
            )
        return "\n".join(lines), len(lines)

    # -- model-owner / committee commands ----------------------------------------------

    def model_submit(self, cube_dir: Path | str, benchmark_id: str,
                     publish_dir: Path | str, assets_base_url: str) -> dict:
        from fedeval.runtime import parse_manifest

        cube_dir = Path(cube_dir)
        manifest = parse_manifest((cube_dir / "cube.yaml").read_text("utf-8"))
        pinned, urls = publish_cube_dir(cube_dir, Path(publish_dir), assets_base_url)
        cube_id = self.client.register_cube(
            {
                "name": manifest.name,
                "kind": "MODEL",
                "manifest_uid": str(pinned.manifest_uid),
                "image_ref": manifest.image_ref,
                "image_uid": str(pinned.image_uid),
                "parameters_uid": str(pinned.parameters_uid) if pinned.parameters_uid else None,
                "extra_files": [{"path": p, "uid": str(u)} for p, u in pinned.extra_files],
                "download_urls": urls,
            }
        )["id"]
        assoc = self.client.request_association(benchmark_id, cube_id, "MODEL")
        return {"cube_id": cube_id, "association_id": assoc["id"]}

    def benchmark_create(self, bundle_dir: Path | str, publish_dir: Path | str,
                         assets_base_url: str) -> dict:
        from fedeval.runtime import parse_manifest

        bundle_dir = Path(bundle_dir)
        spec_path = bundle_dir / "benchmark.yaml"
        if not spec_path.is_file():
            raise DomainError("INVALID_BUNDLE", f"no benchmark.yaml in {bundle_dir}")
        spec = load_restricted_yaml(spec_path.read_text("utf-8"))
        if not isinstance(spec, dict) or not isinstance(spec.get("cubes"), dict):
            raise DomainError("INVALID_BUNDLE", "benchmark.yaml must map cubes to directories")

        cube_ids: dict[str, str] = {}
        for slot, kind in (("preparation", "PREPARATION"), ("metrics", "METRICS"),
                           ("reference_model", "MODEL")):
            rel = spec["cubes"].get(slot)
            if not rel:
                raise DomainError("INVALID_BUNDLE", f"benchmark.yaml names no {slot} cube")
            cube_dir = bundle_dir / rel
            if not (cube_dir / "cube.yaml").is_file():
                raise DomainError("INVALID_BUNDLE", f"{slot} cube directory {rel!r} is incomplete")
            manifest = parse_manifest((cube_dir / "cube.yaml").read_text("utf-8"))
            pinned, urls = publish_cube_dir(cube_dir, Path(publish_dir), assets_base_url)
            cube_ids[slot] = self.client.register_cube(
                {
                    "name": manifest.name,
                    "kind": kind,
                    "manifest_uid": str(pinned.manifest_uid),
                    "image_ref": manifest.image_ref,
                    "image_uid": str(pinned.image_uid),
                    "parameters_uid": str(pinned.parameters_uid) if pinned.parameters_uid else None,
                    "extra_files": [{"path": p, "uid": str(u)} for p, u in pinned.extra_files],
                    "download_urls": urls,
                }
            )["id"]

        response = self.client.register_benchmark(
            {
                "name": spec.get("name", bundle_dir.name),
                "description": spec.get("description", ""),
                "docs_url": spec.get("docs_url", ""),
                "preparation_cube": cube_ids["preparation"],
                "metrics_cube": cube_ids["metrics"],
                "reference_model_cube": cube_ids["reference_model"],
                "metric_specs": spec.get("metric_specs", []),
                "visibility": spec.get("visibility", "OPEN"),
                "allowlist": spec.get("allowlist", []),
                "release_policy": spec.get("release_policy", {}),
            }
        )
        return {"benchmark_id": response["id"], "cubes": cube_ids}
