"""Durable store: optimistic versioning, journal, atomic persistence.

Mutations run against an immutable snapshot and commit via compare-and-set
on the state identity; a loser recomputes against the fresh snapshot. Each
committed mutation appends one journal entry {op, actor_id, payload, now,
new_id}, which is sufficient to rebuild the state from empty (see
:func:`fedeval.server.service.replay_journal`). The store file is written
with write-to-temp + fsync + rename, keeping the audit chain crash-safe.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path
from typing import Any

from fedeval.registry import DomainError, verify_audit_chain
from fedeval.registry.timestamps import format_utc, utc_now

from . import serde
from .service import OPS, StoredState

STORE_FILENAME = "store.json"
STORE_FORMAT = 1


def state_to_json(state: StoredState) -> dict[str, Any]:
    return {
        "accounts": {k: serde.account_to_json(v) for k, v in state.accounts.items()},
        "benchmarks": {k: serde.benchmark_to_json(v) for k, v in state.benchmarks.items()},
        "cubes": {k: serde.cube_to_json(v) for k, v in state.cubes.items()},
        "datasets": {k: serde.dataset_to_json(v) for k, v in state.datasets.items()},
        "associations": {k: serde.association_to_json(v) for k, v in state.associations.items()},
        "results": {k: serde.result_to_json(v) for k, v in state.results.items()},
        "audit": [serde.audit_event_to_json(e) for e in state.audit],
        "version": state.version,
    }


def state_from_json(d: dict[str, Any]) -> StoredState:
    return StoredState(
        accounts={k: serde.account_from_json(v) for k, v in d["accounts"].items()},
        benchmarks={k: serde.benchmark_from_json(v) for k, v in d["benchmarks"].items()},
        cubes={k: serde.cube_from_json(v) for k, v in d["cubes"].items()},
        datasets={k: serde.dataset_from_json(v) for k, v in d["datasets"].items()},
        associations={k: serde.association_from_json(v) for k, v in d["associations"].items()},
        results={k: serde.result_from_json(v) for k, v in d["results"].items()},
        audit=tuple(serde.audit_event_from_json(e) for e in d["audit"]),
        version=int(d["version"]),
    )


class Store:
    """Single-node store; linearizable mutations, lock-free snapshot reads."""

    def __init__(self, data_dir: Path | str | None = None):
        self._lock = threading.Lock()
        self._state = StoredState()
        self._journal: list[dict[str, Any]] = []
        self._path: Path | None = None
        if data_dir is not None:
            data_dir = Path(data_dir)
            data_dir.mkdir(parents=True, exist_ok=True)
            self._path = data_dir / STORE_FILENAME
            if self._path.exists():
                self._load()

    @property
    def state(self) -> StoredState:
        return self._state

    @property
    def journal(self) -> list[dict[str, Any]]:
        return list(self._journal)

    def _load(self) -> None:
        assert self._path is not None
        raw = json.loads(self._path.read_text("utf-8"))
        if raw.get("format") != STORE_FORMAT:
            raise DomainError("STORE_FORMAT", f"unsupported store format {raw.get('format')!r}")
        state = state_from_json(raw["state"])
        bad = verify_audit_chain(state.audit)
        if bad is not None:
            raise DomainError("CHAIN_CORRUPT", f"audit chain invalid at seq {bad}")
        self._state = state
        self._journal = list(raw.get("journal", []))

    def _persist(self) -> None:
        if self._path is None:
            return
        payload = {
            "format": STORE_FORMAT,
            "state": state_to_json(self._state),
            "journal": self._journal,
        }
        tmp = self._path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, separators=(",", ":"))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self._path)

    def apply(self, op: str, actor_id: str, payload: dict[str, Any]) -> dict[str, Any]:
        """Run one named mutation with optimistic retry and journal it."""
        mutation = OPS.get(op)
        if mutation is None:
            raise DomainError("UNKNOWN_OPERATION", f"no mutation named {op!r}")
        while True:
            snapshot = self._state
            actor = snapshot.accounts.get(actor_id) if actor_id else None
            if actor_id and actor is None:
                raise DomainError("UNAUTHENTICATED", "account no longer exists")
            now = utc_now()
            new_id = uuid.uuid4().hex[:12]
            new_state, response = mutation(snapshot, actor, payload, now, new_id)
            if new_state.version != snapshot.version + 1:
                raise DomainError(
                    "VERSION_CONFLICT",
                    f"mutation must bump version by 1 ({snapshot.version} -> {new_state.version})",
                )
            with self._lock:
                if self._state is snapshot:
                    self._state = new_state
                    self._journal.append(
                        {
                            "op": op,
                            "actor_id": actor_id,
                            "payload": payload,
                            "now": format_utc(now),
                            "new_id": new_id,
                        }
                    )
                    self._persist()
                    return response
            # Lost the race: recompute against the newer snapshot.
