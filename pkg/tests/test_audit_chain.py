"""Audit chain: genesis and linking rules, mutate-and-verify oracle."""

import random
from dataclasses import replace
from datetime import timedelta

from fedeval.registry import (
    AuditAction,
    GENESIS_HASH,
    append_audit,
    entry_hash_for,
    hash_bytes,
    verify_audit_chain,
)

from conftest import TS

ACTIONS = list(AuditAction)


def build_chain(n: int):
    log = ()
    for i in range(n):
        log = append_audit(
            log,
            TS + timedelta(seconds=i),
            f"actor-{i % 3}",
            ACTIONS[i % len(ACTIONS)],
            (f"subject-{i}", f"extra-{i % 2}"),
        )
    return log


def test_genesis_entry():
    log = build_chain(1)
    assert log[0].seq == 0
    assert log[0].prev_hash == GENESIS_HASH == "0" * 64


def test_chain_links_prev_hash():
    log = build_chain(2)
    assert log[1].prev_hash == log[0].entry_hash


def test_append_leaves_original_untouched():
    log = build_chain(2)
    longer = append_audit(log, TS, "op", AuditAction.RESULT_UPLOADED, ("r1",))
    assert len(log) == 2 and len(longer) == 3


def test_empty_log_verifies():
    assert verify_audit_chain(()) is None


def test_valid_chain_verifies():
    assert verify_audit_chain(build_chain(3)) is None


def test_single_actor_mutation_detected_at_entry():
    log = list(build_chain(3))
    log[1] = replace(log[1], actor="mallory")
    assert verify_audit_chain(log) == 1


def _mutate_field(entry, rng):
    field = rng.choice(["timestamp", "actor", "action", "subject_ids", "prev_hash", "seq"])
    if field == "timestamp":
        return replace(entry, timestamp=entry.timestamp + timedelta(seconds=1))
    if field == "actor":
        return replace(entry, actor=entry.actor + "x")
    if field == "action":
        others = [a for a in ACTIONS if a is not entry.action]
        return replace(entry, action=rng.choice(others))
    if field == "subject_ids":
        return replace(entry, subject_ids=(*entry.subject_ids, "injected"))
    if field == "prev_hash":
        return replace(entry, prev_hash=hash_bytes(b"bogus"))
    return replace(entry, seq=entry.seq + 1)


def test_mutate_and_verify_oracle():
    # 100 random single-entry mutations; each must be detected at its entry.
    rng = random.Random(7)
    for _ in range(100):
        log = list(build_chain(rng.randint(1, 6)))
        i = rng.randrange(len(log))
        log[i] = _mutate_field(log[i], rng)
        assert verify_audit_chain(log) == i


def test_mutation_with_hash_fixup_detected_by_next_link():
    # An attacker who rewrites an interior entry and recomputes its hash
    # still breaks the next entry's prev_hash link.
    rng = random.Random(11)
    for _ in range(100):
        log = list(build_chain(rng.randint(2, 6)))
        i = rng.randrange(len(log) - 1)
        mutated = _mutate_field(log[i], rng)
        while mutated.seq != i:  # keep seq consistent for the fixup scenario
            mutated = _mutate_field(log[i], rng)
        fixed = replace(
            mutated,
            entry_hash=entry_hash_for(
                mutated.seq,
                mutated.timestamp,
                mutated.actor,
                mutated.action,
                mutated.subject_ids,
                mutated.prev_hash,
            ),
        )
        log[i] = fixed
        verdict = verify_audit_chain(log)
        assert verdict in (i, i + 1)
