"""Entity types for the benchmarking registry.

All types are immutable value objects. Cross-entity invariants (dangling
references, allowlist rules, hash agreement) are checked by the validators
in :mod:`fedeval.registry.validation`, not at construction, so that a
defective bundle can still be represented and reported on.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from enum import Enum

from .uids import ContentUid


class AggregationMethod(str, Enum):
    WEIGHTED_MEAN = "WEIGHTED_MEAN"
    UNWEIGHTED_MEAN = "UNWEIGHTED_MEAN"
    MIN = "MIN"
    MAX = "MAX"


class Role(str, Enum):
    COMMITTEE = "COMMITTEE"
    DATA_OWNER = "DATA_OWNER"
    MODEL_OWNER = "MODEL_OWNER"
    PLATFORM_OPERATOR = "PLATFORM_OPERATOR"


class CubeKind(str, Enum):
    PREPARATION = "PREPARATION"
    MODEL = "MODEL"
    METRICS = "METRICS"


class Visibility(str, Enum):
    OPEN = "OPEN"
    CLOSED = "CLOSED"


class BenchmarkState(str, Enum):
    DRAFT = "DRAFT"
    OPERATIONAL = "OPERATIONAL"
    RETIRED = "RETIRED"


class AssociationState(str, Enum):
    REQUESTED = "REQUESTED"
    APPROVED = "APPROVED"
    REJECTED = "REJECTED"


class SubjectKind(str, Enum):
    DATASET = "DATASET"
    MODEL = "MODEL"


class ReleaseMode(str, Enum):
    PRIVATE = "PRIVATE"
    OWNER_SCOPED = "OWNER_SCOPED"
    PUBLIC = "PUBLIC"


class AuditAction(str, Enum):
    """Auditable transaction kinds, shared by the server and agent chains."""

    BENCHMARK_REGISTERED = "BENCHMARK_REGISTERED"
    CUBE_REGISTERED = "CUBE_REGISTERED"
    DATASET_REGISTERED = "DATASET_REGISTERED"
    ASSOCIATION_REQUESTED = "ASSOCIATION_REQUESTED"
    ASSOCIATION_DECIDED = "ASSOCIATION_DECIDED"
    MODEL_EXEC_APPROVED = "MODEL_EXEC_APPROVED"
    MODEL_EXEC_REJECTED = "MODEL_EXEC_REJECTED"
    RESULT_UPLOAD_APPROVED = "RESULT_UPLOAD_APPROVED"
    RESULT_UPLOAD_REJECTED = "RESULT_UPLOAD_REJECTED"
    RESULT_UPLOADED = "RESULT_UPLOADED"
    RESULTS_RELEASED = "RESULTS_RELEASED"
    # Lifecycle / provisioning events not named in the core action table.
    BENCHMARK_ACTIVATED = "BENCHMARK_ACTIVATED"
    BENCHMARK_RETIRED = "BENCHMARK_RETIRED"
    ACCOUNT_CREATED = "ACCOUNT_CREATED"
    # Agent-local events (approval log uses the same chain format).
    STATS_UPLOAD_APPROVED = "STATS_UPLOAD_APPROVED"
    STATS_UPLOAD_REJECTED = "STATS_UPLOAD_REJECTED"
    DATASET_PREPARED = "DATASET_PREPARED"
    EVALUATION_EXECUTED = "EVALUATION_EXECUTED"


@dataclass(frozen=True)
class MetricSpec:
    """What a benchmark measures and how sites' values combine.

    ``decomposable`` asserts that the pooled metric over the union of all
    samples equals the sample-count-weighted mean of per-site values (true
    for count ratios like accuracy, false for e.g. AUC).
    """

    name: str
    range: tuple[float, float]
    higher_is_better: bool = True
    decomposable: bool = False
    aggregation: AggregationMethod = AggregationMethod.WEIGHTED_MEAN

    def __post_init__(self) -> None:
        lo, hi = self.range
        if not lo <= hi:
            raise ValueError(f"empty metric range for {self.name!r}: {self.range}")


@dataclass(frozen=True)
class CubeRecord:
    """A container-packaged pipeline step with pinned content hashes.

    Asset bytes live wherever the owner hosts them; ``download_urls``
    (component name -> URL) lets executors fetch what the hashes pin.
    """

    id: str
    name: str
    kind: CubeKind
    manifest_uid: ContentUid
    image_ref: str
    image_uid: ContentUid
    owner_id: str
    registered_at: datetime
    parameters_uid: ContentUid | None = None
    extra_files: tuple[tuple[str, ContentUid], ...] = ()
    download_urls: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ReleasePolicy:
    mode: ReleaseMode = ReleaseMode.PRIVATE
    show_per_site: bool = False


@dataclass(frozen=True)
class Benchmark:
    """The asset bundle binding cubes, metric specs, and policies."""

    id: str
    name: str
    description: str
    docs_url: str
    preparation_cube: str
    metrics_cube: str
    reference_model_cube: str
    metric_specs: tuple[MetricSpec, ...]
    committee_id: str
    visibility: Visibility = Visibility.OPEN
    allowlist: frozenset[str] = frozenset()
    release_policy: ReleasePolicy = ReleasePolicy()
    state: BenchmarkState = BenchmarkState.DRAFT


@dataclass(frozen=True)
class DatasetRecord:
    """Metadata-only registration of a prepared dataset.

    Carries no data content: just the tree UID, counts, and the statistics
    the owning operator approved for upload.
    """

    generated_uid: ContentUid
    name: str
    owner_id: str
    benchmark_prep_cube: str
    sample_count: int
    statistics: dict[str, float]
    registered_at: datetime


@dataclass(frozen=True)
class Association:
    """Approval state linking a dataset or model to a benchmark.

    REQUESTED is the only initial state; APPROVED and REJECTED are
    terminal. ``decided_by``/``decided_at`` are populated exactly when the
    state is terminal.
    """

    id: str
    benchmark_id: str
    subject: str
    subject_kind: SubjectKind
    state: AssociationState
    requested_by: str
    requested_at: datetime
    decided_by: str | None = None
    decided_at: datetime | None = None

    def __post_init__(self) -> None:
        terminal = self.state in (AssociationState.APPROVED, AssociationState.REJECTED)
        decided = self.decided_by is not None and self.decided_at is not None
        if terminal != decided:
            raise ValueError(
                f"decided_by/decided_at must be set iff terminal (state={self.state})"
            )


@dataclass(frozen=True)
class ExecutedHashes:
    """Manifest UIDs actually verified on the data owner's machine at run time."""

    prep: ContentUid
    model: ContentUid
    metrics_cube: ContentUid


@dataclass(frozen=True)
class EvaluationResult:
    """Metrics-only payload for one (benchmark, dataset, model) triple."""

    id: str
    benchmark_id: str
    dataset_uid: ContentUid
    model_cube_id: str
    metrics: dict[str, float]
    sample_count: int
    executed_hashes: ExecutedHashes
    operator_id: str
    model_approved_at: datetime
    result_approved_at: datetime
    uploaded_at: datetime

    def triple(self) -> tuple[str, str, str]:
        return (self.benchmark_id, str(self.dataset_uid), self.model_cube_id)


@dataclass(frozen=True)
class AuditEvent:
    """One hash-chained entry of an append-only transaction log."""

    seq: int
    timestamp: datetime
    actor: str
    action: AuditAction
    subject_ids: tuple[str, ...]
    prev_hash: ContentUid
    entry_hash: ContentUid


@dataclass(frozen=True)
class EvaluationTask:
    """A (benchmark, dataset, model) triple awaiting local evaluation."""

    benchmark_id: str
    dataset_uid: ContentUid
    model_cube_id: str


@dataclass(frozen=True)
class Account:
    id: str
    display_name: str
    roles: frozenset[Role]
    token_hash: ContentUid

    def __post_init__(self) -> None:
        if not self.roles:
            raise ValueError("account must hold at least one role")
