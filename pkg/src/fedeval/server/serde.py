"""JSON mappings for domain entities.

Field names match the domain types one-for-one (snake_case); timestamps
use the UTC second-resolution wire format; enums serialize as their
values; UIDs as their hex strings.
"""

from __future__ import annotations

from typing import Any

from fedeval.registry import (
    Account,
    AggregateValue,
    Association,
    AssociationState,
    AuditAction,
    AuditEvent,
    Benchmark,
    BenchmarkReport,
    BenchmarkState,
    ContentUid,
    CubeKind,
    CubeRecord,
    DatasetRecord,
    EvaluationResult,
    MetricSpec,
    ReleaseMode,
    ReleasePolicy,
    Role,
    Visibility,
)
from fedeval.registry.aggregation import AggregationMethod
from fedeval.registry.model import ExecutedHashes, SubjectKind
from fedeval.registry.timestamps import format_utc, parse_utc


def account_to_json(a: Account) -> dict[str, Any]:
    return {
        "id": a.id,
        "display_name": a.display_name,
        "roles": sorted(r.value for r in a.roles),
        "token_hash": str(a.token_hash),
    }


def account_from_json(d: dict[str, Any]) -> Account:
    return Account(
        id=d["id"],
        display_name=d["display_name"],
        roles=frozenset(Role(r) for r in d["roles"]),
        token_hash=ContentUid(d["token_hash"]),
    )


def metric_spec_to_json(m: MetricSpec) -> dict[str, Any]:
    return {
        "name": m.name,
        "range": [m.range[0], m.range[1]],
        "higher_is_better": m.higher_is_better,
        "decomposable": m.decomposable,
        "aggregation": m.aggregation.value,
    }


def metric_spec_from_json(d: dict[str, Any]) -> MetricSpec:
    return MetricSpec(
        name=d["name"],
        range=(float(d["range"][0]), float(d["range"][1])),
        higher_is_better=bool(d.get("higher_is_better", True)),
        decomposable=bool(d.get("decomposable", False)),
        aggregation=AggregationMethod(d.get("aggregation", "WEIGHTED_MEAN")),
    )


def benchmark_to_json(b: Benchmark) -> dict[str, Any]:
    return {
        "id": b.id,
        "name": b.name,
        "description": b.description,
        "docs_url": b.docs_url,
        "preparation_cube": b.preparation_cube,
        "metrics_cube": b.metrics_cube,
        "reference_model_cube": b.reference_model_cube,
        "metric_specs": [metric_spec_to_json(m) for m in b.metric_specs],
        "visibility": b.visibility.value,
        "allowlist": sorted(b.allowlist),
        "release_policy": {
            "mode": b.release_policy.mode.value,
            "show_per_site": b.release_policy.show_per_site,
        },
        "state": b.state.value,
        "committee_id": b.committee_id,
    }


def benchmark_from_json(d: dict[str, Any]) -> Benchmark:
    policy = d.get("release_policy") or {}
    return Benchmark(
        id=d["id"],
        name=d["name"],
        description=d["description"],
        docs_url=d["docs_url"],
        preparation_cube=d["preparation_cube"],
        metrics_cube=d["metrics_cube"],
        reference_model_cube=d["reference_model_cube"],
        metric_specs=tuple(metric_spec_from_json(m) for m in d["metric_specs"]),
        visibility=Visibility(d["visibility"]),
        allowlist=frozenset(d.get("allowlist", [])),
        release_policy=ReleasePolicy(
            mode=ReleaseMode(policy.get("mode", "PRIVATE")),
            show_per_site=bool(policy.get("show_per_site", False)),
        ),
        state=BenchmarkState(d["state"]),
        committee_id=d["committee_id"],
    )


def cube_to_json(c: CubeRecord) -> dict[str, Any]:
    return {
        "id": c.id,
        "name": c.name,
        "kind": c.kind.value,
        "manifest_uid": str(c.manifest_uid),
        "image_ref": c.image_ref,
        "image_uid": str(c.image_uid),
        "parameters_uid": str(c.parameters_uid) if c.parameters_uid else None,
        "extra_files": [{"path": p, "uid": str(u)} for p, u in c.extra_files],
        "owner_id": c.owner_id,
        "registered_at": format_utc(c.registered_at),
        "download_urls": dict(c.download_urls),
    }


def cube_from_json(d: dict[str, Any]) -> CubeRecord:
    params = d.get("parameters_uid")
    return CubeRecord(
        id=d["id"],
        name=d["name"],
        kind=CubeKind(d["kind"]),
        manifest_uid=ContentUid(d["manifest_uid"]),
        image_ref=d["image_ref"],
        image_uid=ContentUid(d["image_uid"]),
        parameters_uid=ContentUid(params) if params else None,
        extra_files=tuple((e["path"], ContentUid(e["uid"])) for e in d.get("extra_files", [])),
        owner_id=d["owner_id"],
        registered_at=parse_utc(d["registered_at"]),
        download_urls=tuple((k, v) for k, v in sorted(d.get("download_urls", {}).items())),
    )


def dataset_to_json(ds: DatasetRecord) -> dict[str, Any]:
    return {
        "generated_uid": str(ds.generated_uid),
        "name": ds.name,
        "owner_id": ds.owner_id,
        "benchmark_prep_cube": ds.benchmark_prep_cube,
        "sample_count": ds.sample_count,
        "statistics": dict(ds.statistics),
        "registered_at": format_utc(ds.registered_at),
    }


def dataset_from_json(d: dict[str, Any]) -> DatasetRecord:
    return DatasetRecord(
        generated_uid=ContentUid(d["generated_uid"]),
        name=d["name"],
        owner_id=d["owner_id"],
        benchmark_prep_cube=d["benchmark_prep_cube"],
        sample_count=int(d["sample_count"]),
        statistics={k: float(v) for k, v in d["statistics"].items()},
        registered_at=parse_utc(d["registered_at"]),
    )


def association_to_json(a: Association) -> dict[str, Any]:
    return {
        "id": a.id,
        "benchmark_id": a.benchmark_id,
        "subject": a.subject,
        "subject_kind": a.subject_kind.value,
        "state": a.state.value,
        "requested_by": a.requested_by,
        "requested_at": format_utc(a.requested_at),
        "decided_by": a.decided_by,
        "decided_at": format_utc(a.decided_at) if a.decided_at else None,
    }


def association_from_json(d: dict[str, Any]) -> Association:
    return Association(
        id=d["id"],
        benchmark_id=d["benchmark_id"],
        subject=d["subject"],
        subject_kind=SubjectKind(d["subject_kind"]),
        state=AssociationState(d["state"]),
        requested_by=d["requested_by"],
        requested_at=parse_utc(d["requested_at"]),
        decided_by=d.get("decided_by"),
        decided_at=parse_utc(d["decided_at"]) if d.get("decided_at") else None,
    )


def result_to_json(r: EvaluationResult) -> dict[str, Any]:
    return {
        "id": r.id,
        "benchmark_id": r.benchmark_id,
        "dataset_uid": str(r.dataset_uid),
        "model_cube_id": r.model_cube_id,
        "metrics": dict(r.metrics),
        "sample_count": r.sample_count,
        "executed_hashes": {
            "prep": str(r.executed_hashes.prep),
            "model": str(r.executed_hashes.model),
            "metrics_cube": str(r.executed_hashes.metrics_cube),
        },
        "operator_id": r.operator_id,
        "model_approved_at": format_utc(r.model_approved_at),
        "result_approved_at": format_utc(r.result_approved_at),
        "uploaded_at": format_utc(r.uploaded_at),
    }


def result_from_json(d: dict[str, Any]) -> EvaluationResult:
    eh = d["executed_hashes"]
    return EvaluationResult(
        id=d["id"],
        benchmark_id=d["benchmark_id"],
        dataset_uid=ContentUid(d["dataset_uid"]),
        model_cube_id=d["model_cube_id"],
        metrics={k: float(v) for k, v in d["metrics"].items()},
        sample_count=int(d["sample_count"]),
        executed_hashes=ExecutedHashes(
            prep=ContentUid(eh["prep"]),
            model=ContentUid(eh["model"]),
            metrics_cube=ContentUid(eh["metrics_cube"]),
        ),
        operator_id=d["operator_id"],
        model_approved_at=parse_utc(d["model_approved_at"]),
        result_approved_at=parse_utc(d["result_approved_at"]),
        uploaded_at=parse_utc(d["uploaded_at"]),
    )


def audit_event_to_json(e: AuditEvent) -> dict[str, Any]:
    return {
        "seq": e.seq,
        "timestamp": format_utc(e.timestamp),
        "actor": e.actor,
        "action": e.action.value,
        "subject_ids": list(e.subject_ids),
        "prev_hash": str(e.prev_hash),
        "entry_hash": str(e.entry_hash),
    }


def audit_event_from_json(d: dict[str, Any]) -> AuditEvent:
    return AuditEvent(
        seq=int(d["seq"]),
        timestamp=parse_utc(d["timestamp"]),
        actor=d["actor"],
        action=AuditAction(d["action"]),
        subject_ids=tuple(d["subject_ids"]),
        prev_hash=ContentUid(d["prev_hash"]),
        entry_hash=ContentUid(d["entry_hash"]),
    )


def aggregate_value_to_json(v: AggregateValue) -> dict[str, Any]:
    return {
        "value": float(v.value),
        "site_count": v.site_count,
        "total_samples": v.total_samples,
    }


def report_to_json(report: BenchmarkReport) -> dict[str, Any]:
    return {
        "benchmark_id": report.benchmark_id,
        "benchmark_name": report.benchmark_name,
        "aggregates": [
            {
                "model_cube_id": agg.model_cube_id,
                "model_name": agg.model_name,
                "model_owner_id": agg.model_owner_id,
                "metrics": {
                    name: aggregate_value_to_json(val) for name, val in agg.metrics.items()
                },
            }
            for agg in report.aggregates
        ],
        "site_rows": [
            {
                "model_cube_id": row.model_cube_id,
                "model_name": row.model_name,
                "model_owner_id": row.model_owner_id,
                "dataset_uid": row.dataset_uid,
                "dataset_name": row.dataset_name,
                "dataset_owner_id": row.dataset_owner_id,
                "metrics": dict(row.metrics),
                "sample_count": row.sample_count,
            }
            for row in report.site_rows
        ],
    }
