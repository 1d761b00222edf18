"""Pure domain model: entities, state machines, hashing, audit, aggregation.

Everything in this package is a pure function over immutable values; there
is no persistence, no clock, and no I/O. Timestamps are always supplied by
callers.
"""

from .aggregation import AggregateValue, AggregationMethod, aggregate_results
from .audit import (
    GENESIS_HASH,
    append_audit,
    canonical_event_bytes,
    entry_hash_for,
    verify_audit_chain,
)
from .errors import DomainError
from .lifecycle import (
    AssociationAction,
    BenchmarkAction,
    transition_association,
    transition_benchmark,
)
from .model import (
    Account,
    Association,
    AssociationState,
    AuditAction,
    AuditEvent,
    Benchmark,
    BenchmarkState,
    CubeKind,
    CubeRecord,
    DatasetRecord,
    EvaluationResult,
    EvaluationTask,
    MetricSpec,
    ReleaseMode,
    ReleasePolicy,
    Role,
    Visibility,
)
from .pending import RegistryView, pending_tasks
from .release import (
    BenchmarkReport,
    ModelAggregate,
    ReportViewer,
    SiteRow,
    apply_release_policy,
)
from .uids import ContentUid, ZERO_UID, compute_content_uid, hash_bytes, hash_tree_path
from .validation import Defect, validate_benchmark_bundle, validate_result

__all__ = [
    "Account",
    "AggregateValue",
    "AggregationMethod",
    "Association",
    "AssociationAction",
    "AssociationState",
    "AuditAction",
    "AuditEvent",
    "Benchmark",
    "BenchmarkAction",
    "BenchmarkReport",
    "BenchmarkState",
    "ContentUid",
    "CubeKind",
    "CubeRecord",
    "DatasetRecord",
    "Defect",
    "DomainError",
    "EvaluationResult",
    "EvaluationTask",
    "GENESIS_HASH",
    "MetricSpec",
    "ModelAggregate",
    "RegistryView",
    "ReleaseMode",
    "ReleasePolicy",
    "ReportViewer",
    "Role",
    "SiteRow",
    "Visibility",
    "ZERO_UID",
    "aggregate_results",
    "append_audit",
    "apply_release_policy",
    "canonical_event_bytes",
    "compute_content_uid",
    "entry_hash_for",
    "hash_bytes",
    "hash_tree_path",
    "pending_tasks",
    "transition_association",
    "transition_benchmark",
    "validate_benchmark_bundle",
    "validate_result",
    "verify_audit_chain",
]
