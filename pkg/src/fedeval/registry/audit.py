"""Hash-chained, append-only audit log.

Canonical serialization (version 0x01), hashed with SHA-256 to produce
``entry_hash``:

    0x01                                     format byte
    seq          8-byte big-endian unsigned
    timestamp    u32 length + UTF-8 "YYYY-MM-DDTHH:MM:SSZ"
    actor        u32 length + UTF-8
    action       u32 length + UTF-8 enum value
    subject_ids  u32 count, then per id: u32 length + UTF-8
    prev_hash    32 raw digest bytes

``prev_hash`` of entry 0 is the 64-zero digest; ``prev_hash`` of entry
n>0 equals ``entry_hash`` of entry n-1. The encoding is bit-exact: any
single-byte change to a serialized entry changes its hash.
"""

from __future__ import annotations

import struct
from datetime import datetime
from typing import Sequence

from .model import AuditAction, AuditEvent
from .timestamps import format_utc
from .uids import ContentUid, ZERO_UID, hash_bytes

FORMAT_VERSION = 0x01
GENESIS_HASH = ZERO_UID


def _lp(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


def canonical_event_bytes(
    seq: int,
    timestamp: datetime,
    actor: str,
    action: AuditAction | str,
    subject_ids: Sequence[str],
    prev_hash: ContentUid,
) -> bytes:
    if seq < 0:
        raise ValueError(f"seq must be non-negative: {seq}")
    action_value = action.value if isinstance(action, AuditAction) else str(action)
    out = bytes([FORMAT_VERSION])
    out += struct.pack(">Q", seq)
    out += _lp(format_utc(timestamp).encode("utf-8"))
    out += _lp(actor.encode("utf-8"))
    out += _lp(action_value.encode("utf-8"))
    out += struct.pack(">I", len(subject_ids))
    for sid in subject_ids:
        out += _lp(sid.encode("utf-8"))
    out += bytes.fromhex(prev_hash)
    return out


def entry_hash_for(
    seq: int,
    timestamp: datetime,
    actor: str,
    action: AuditAction | str,
    subject_ids: Sequence[str],
    prev_hash: ContentUid,
) -> ContentUid:
    return hash_bytes(canonical_event_bytes(seq, timestamp, actor, action, subject_ids, prev_hash))


def append_audit(
    log: Sequence[AuditEvent],
    timestamp: datetime,
    actor: str,
    action: AuditAction,
    subject_ids: Sequence[str],
) -> tuple[AuditEvent, ...]:
    """Return a new chain with one entry appended; ``log`` is untouched."""
    seq = len(log)
    prev_hash = log[-1].entry_hash if log else GENESIS_HASH
    event = AuditEvent(
        seq=seq,
        timestamp=timestamp,
        actor=actor,
        action=action,
        subject_ids=tuple(subject_ids),
        prev_hash=prev_hash,
        entry_hash=entry_hash_for(seq, timestamp, actor, action, subject_ids, prev_hash),
    )
    return (*log, event)


def verify_audit_chain(log: Sequence[AuditEvent]) -> int | None:
    """Return None if the chain is intact, else the smallest violating seq.

    An entry violates if its seq is out of order, its prev_hash does not
    link to the previous entry (or the genesis digest), or its entry_hash
    does not recompute from the canonical serialization.
    """
    expected_prev = GENESIS_HASH
    for i, event in enumerate(log):
        if event.seq != i or event.prev_hash != expected_prev:
            return i
        recomputed = entry_hash_for(
            event.seq, event.timestamp, event.actor, event.action,
            event.subject_ids, event.prev_hash,
        )
        if event.entry_hash != recomputed:
            return i
        expected_prev = event.entry_hash
    return None
