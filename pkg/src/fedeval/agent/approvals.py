"""Local approval log: the same hash-chained format as the server audit chain.

Each line of approvals.jsonl is one chain entry; approval entries carry
extra display columns (what/decision/shown_digest), and the shown digest
is also embedded in the hashed subject_ids, binding every approval to the
exact content the operator reviewed. Hand-editing any line breaks the
chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path

from fedeval.registry import (
    AuditAction,
    AuditEvent,
    ContentUid,
    DomainError,
    append_audit,
    verify_audit_chain,
)
from fedeval.registry.timestamps import format_utc, parse_utc


class ApprovalKind(str, Enum):
    MODEL_EXECUTION = "MODEL_EXECUTION"
    STATS_UPLOAD = "STATS_UPLOAD"
    RESULT_UPLOAD = "RESULT_UPLOAD"


_ACTION_FOR = {
    (ApprovalKind.MODEL_EXECUTION, True): AuditAction.MODEL_EXEC_APPROVED,
    (ApprovalKind.MODEL_EXECUTION, False): AuditAction.MODEL_EXEC_REJECTED,
    (ApprovalKind.STATS_UPLOAD, True): AuditAction.STATS_UPLOAD_APPROVED,
    (ApprovalKind.STATS_UPLOAD, False): AuditAction.STATS_UPLOAD_REJECTED,
    (ApprovalKind.RESULT_UPLOAD, True): AuditAction.RESULT_UPLOAD_APPROVED,
    (ApprovalKind.RESULT_UPLOAD, False): AuditAction.RESULT_UPLOAD_REJECTED,
}


@dataclass(frozen=True)
class ApprovalRecord:
    what: ApprovalKind
    subject_ids: tuple[str, ...]
    decision: str  # APPROVE | REJECT
    operator: str
    shown_digest: ContentUid
    timestamp: datetime

    @property
    def approved(self) -> bool:
        return self.decision == "APPROVE"


class ApprovalLog:
    def __init__(self, path: Path):
        self.path = path

    def _load_lines(self) -> list[dict]:
        if not self.path.exists():
            return []
        lines = []
        for raw in self.path.read_text("utf-8").splitlines():
            if raw.strip():
                lines.append(json.loads(raw))
        return lines

    def events(self) -> list[AuditEvent]:
        events = []
        for i, line in enumerate(self._load_lines()):
            try:
                events.append(
                    AuditEvent(
                        seq=int(line["seq"]),
                        timestamp=parse_utc(line["timestamp"]),
                        actor=line["actor"],
                        action=AuditAction(line["action"]),
                        subject_ids=tuple(line["subject_ids"]),
                        prev_hash=ContentUid(line["prev_hash"]),
                        entry_hash=ContentUid(line["entry_hash"]),
                    )
                )
            except (KeyError, ValueError) as exc:
                raise DomainError("CHAIN_CORRUPT", f"unparseable entry at seq {i}: {exc}")
        return events

    def entries(self) -> list[dict]:
        """Raw lines (chain fields plus approval columns) for display."""
        return self._load_lines()

    def verify(self) -> None:
        """DomainError(CHAIN_CORRUPT) naming the first bad seq, if any."""
        bad = verify_audit_chain(self.events())
        if bad is not None:
            raise DomainError("CHAIN_CORRUPT", f"approval chain invalid at seq {bad}")

    def _append(self, action: AuditAction, actor: str, subject_ids: tuple[str, ...],
                timestamp: datetime, extra: dict | None = None) -> AuditEvent:
        events = self.events()
        chain = append_audit(events, timestamp, actor, action, subject_ids)
        event = chain[-1]
        line = {
            "seq": event.seq,
            "timestamp": format_utc(event.timestamp),
            "actor": event.actor,
            "action": event.action.value,
            "subject_ids": list(event.subject_ids),
            "prev_hash": str(event.prev_hash),
            "entry_hash": str(event.entry_hash),
        }
        if extra:
            line.update(extra)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(line, sort_keys=True) + "\n")
        return event

    def record_event(self, action: AuditAction, actor: str, subject_ids: tuple[str, ...],
                     timestamp: datetime) -> AuditEvent:
        return self._append(action, actor, subject_ids, timestamp)

    def record_approval(self, record: ApprovalRecord) -> AuditEvent:
        action = _ACTION_FOR[(record.what, record.approved)]
        # shown_digest rides in subject_ids so the chain hash covers it.
        subject_ids = (*record.subject_ids, f"shown:{record.shown_digest}")
        return self._append(
            action,
            record.operator,
            subject_ids,
            record.timestamp,
            extra={
                "what": record.what.value,
                "decision": record.decision,
                "shown_digest": str(record.shown_digest),
            },
        )

    def find_decision(self, what: ApprovalKind, shown_digest: ContentUid) -> ApprovalRecord | None:
        """Latest recorded decision bound to exactly this reviewed content."""
        found: ApprovalRecord | None = None
        for line in self._load_lines():
            if line.get("what") == what.value and line.get("shown_digest") == str(shown_digest):
                found = ApprovalRecord(
                    what=what,
                    subject_ids=tuple(line["subject_ids"][:-1]),
                    decision=line["decision"],
                    operator=line["actor"],
                    shown_digest=ContentUid(line["shown_digest"]),
                    timestamp=parse_utc(line["timestamp"]),
                )
        return found
