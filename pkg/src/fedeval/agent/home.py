"""Agent home directory: content-addressed assets, datasets, drafts, logs.

Layout under FEDEVAL_AGENT_HOME:

    assets/<manifest_uid>/     verified (and, for models, approved) cube dirs
    quarantine/<manifest_uid>/ downloaded model cubes awaiting approval;
                               never mounted into a workspace from here
    datasets/<name>/meta.json  local dataset state
    drafts/<task_id>.json      evaluation results awaiting upload approval
    pending.json               last-polled task list (offline review)
    approvals.jsonl            hash-chained approval log
    workspaces/                per-run scratch, one fresh dir per task
"""

from __future__ import annotations

import json
import shutil
import uuid
from pathlib import Path
from typing import Any

from .approvals import ApprovalLog


class AgentHome:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.approvals = ApprovalLog(self.root / "approvals.jsonl")

    # -- generic json slots ---------------------------------------------------

    def _read_json(self, path: Path) -> Any:
        return json.loads(path.read_text("utf-8")) if path.exists() else None

    def _write_json(self, path: Path, value: Any) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(value, indent=2, sort_keys=True) + "\n", "utf-8")

    # -- datasets ---------------------------------------------------------------

    def dataset_meta_path(self, name: str) -> Path:
        return self.root / "datasets" / name / "meta.json"

    def save_dataset(self, meta: dict) -> None:
        self._write_json(self.dataset_meta_path(meta["name"]), meta)

    def load_dataset(self, name: str) -> dict | None:
        return self._read_json(self.dataset_meta_path(name))

    def find_dataset_by_uid(self, uid: str) -> dict | None:
        datasets_dir = self.root / "datasets"
        if not datasets_dir.is_dir():
            return None
        for meta_path in sorted(datasets_dir.glob("*/meta.json")):
            meta = self._read_json(meta_path)
            if meta and meta.get("generated_uid") == uid:
                return meta
        return None

    def list_datasets(self) -> list[dict]:
        datasets_dir = self.root / "datasets"
        if not datasets_dir.is_dir():
            return []
        return [self._read_json(p) for p in sorted(datasets_dir.glob("*/meta.json"))]

    # -- pending cache ---------------------------------------------------------

    @property
    def pending_path(self) -> Path:
        return self.root / "pending.json"

    def save_pending(self, tasks: list[dict]) -> None:
        self._write_json(self.pending_path, tasks)

    def load_pending(self) -> list[dict]:
        return self._read_json(self.pending_path) or []

    # -- suppressed (operator-rejected) tasks ------------------------------------

    @property
    def suppressed_path(self) -> Path:
        return self.root / "suppressed.json"

    def suppress_task(self, task_id: str) -> None:
        suppressed = set(self._read_json(self.suppressed_path) or [])
        suppressed.add(task_id)
        self._write_json(self.suppressed_path, sorted(suppressed))

    def suppressed_tasks(self) -> set[str]:
        return set(self._read_json(self.suppressed_path) or [])

    # -- drafts -------------------------------------------------------------------

    def draft_path(self, task_id: str) -> Path:
        return self.root / "drafts" / f"{task_id}.json"

    def save_draft(self, task_id: str, draft: dict) -> None:
        self._write_json(self.draft_path(task_id), draft)

    def load_draft(self, task_id: str) -> dict | None:
        return self._read_json(self.draft_path(task_id))

    # -- cube asset dirs -------------------------------------------------------------

    def asset_dir(self, manifest_uid: str) -> Path:
        return self.root / "assets" / manifest_uid

    def quarantine_dir(self, manifest_uid: str) -> Path:
        return self.root / "quarantine" / manifest_uid

    def promote_quarantined(self, manifest_uid: str) -> Path:
        """Move an approved model cube from quarantine into the asset store."""
        src = self.quarantine_dir(manifest_uid)
        dest = self.asset_dir(manifest_uid)
        if dest.exists():
            shutil.rmtree(src, ignore_errors=True)
            return dest
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.move(str(src), str(dest))
        return dest

    def fresh_workspace(self, label: str) -> Path:
        ws = self.root / "workspaces" / f"{label}-{uuid.uuid4().hex[:8]}"
        ws.parent.mkdir(parents=True, exist_ok=True)
        return ws
