"""State transitions and queries over the stored registry.

Every mutation is a pure, replayable function

    op(state, actor, payload, now, new_id) -> (new_state, response)

where ``payload`` is the raw JSON body, ``now`` and ``new_id`` are
supplied by the store (and recorded in its journal, so replaying the
journal against an empty state reproduces the final state bit-for-bit,
audit chain included). Each mutation appends exactly one audit event and
bumps the version by exactly one.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Any, Callable

from fedeval.registry import (
    Account,
    Association,
    AssociationAction,
    AssociationState,
    AuditAction,
    AuditEvent,
    Benchmark,
    BenchmarkAction,
    BenchmarkState,
    ContentUid,
    CubeKind,
    CubeRecord,
    DatasetRecord,
    DomainError,
    EvaluationResult,
    RegistryView,
    ReleaseMode,
    ReleasePolicy,
    ReportViewer,
    Role,
    Visibility,
    aggregate_results,
    append_audit,
    apply_release_policy,
    pending_tasks,
    transition_association,
    transition_benchmark,
    validate_benchmark_bundle,
    validate_result,
)
from fedeval.registry.model import ExecutedHashes, SubjectKind
from fedeval.registry.release import BenchmarkReport, ModelAggregate, SiteRow
from fedeval.registry.timestamps import parse_utc
from fedeval.runtime.verify import RESERVED_FILENAMES

from .serde import association_to_json, benchmark_to_json, cube_to_json, metric_spec_from_json

MAX_STATISTICS_ENTRIES = 256


@dataclass(frozen=True)
class StoredState:
    """The whole registry as one immutable value."""

    accounts: dict[str, Account] = field(default_factory=dict)
    benchmarks: dict[str, Benchmark] = field(default_factory=dict)
    cubes: dict[str, CubeRecord] = field(default_factory=dict)
    datasets: dict[str, DatasetRecord] = field(default_factory=dict)
    associations: dict[str, Association] = field(default_factory=dict)
    results: dict[str, EvaluationResult] = field(default_factory=dict)
    audit: tuple[AuditEvent, ...] = ()
    version: int = 0

    def view(self) -> RegistryView:
        return RegistryView(
            benchmarks=self.benchmarks,
            cubes=self.cubes,
            datasets=self.datasets,
            associations=self.associations,
            results=self.results,
        )


def _commit(
    state: StoredState,
    *,
    now: datetime,
    actor: str,
    action: AuditAction,
    subjects: tuple[str, ...],
    **updates: Any,
) -> StoredState:
    audit = append_audit(state.audit, now, actor, action, subjects)
    return replace(state, version=state.version + 1, audit=audit, **updates)


def _require(condition: bool, code: str, message: str) -> None:
    if not condition:
        raise DomainError(code, message)


def _require_roles(actor: Account | None, *roles: Role) -> Account:
    if actor is None:
        raise DomainError("UNAUTHENTICATED", "authentication required")
    if not set(roles) & actor.roles:
        needed = " or ".join(r.value for r in roles)
        raise DomainError("FORBIDDEN", f"requires role {needed}")
    return actor


def _as_number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError("VALIDATION", f"{what} must be a number, got {value!r}")
    return float(value)


def _as_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str) or not value:
        raise DomainError("VALIDATION", f"field {key!r} must be a non-empty string")
    return value


def _as_uid(payload: dict, key: str) -> ContentUid:
    try:
        return ContentUid(_as_str(payload, key))
    except ValueError as exc:
        raise DomainError("VALIDATION", f"field {key!r}: {exc}")


# --------------------------------------------------------------------------
# Mutations
# --------------------------------------------------------------------------


def op_create_account(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    has_operator = any(Role.PLATFORM_OPERATOR in a.roles for a in state.accounts.values())
    if actor is None:
        # Bootstrap path: only until the first operator account exists.
        _require(not has_operator, "FORBIDDEN", "bootstrap is closed once an operator exists")
        actor_id = "@bootstrap"
    else:
        _require_roles(actor, Role.PLATFORM_OPERATOR)
        actor_id = actor.id

    account_id = payload.get("id") or new_id
    _require(account_id not in state.accounts, "DUPLICATE_ACCOUNT", f"account {account_id!r} exists")
    roles_raw = payload.get("roles") or []
    try:
        roles = frozenset(Role(r) for r in roles_raw)
    except ValueError as exc:
        raise DomainError("VALIDATION", str(exc))
    _require(bool(roles), "VALIDATION", "account needs at least one role")
    token_hash = _as_uid(payload, "token_hash")
    _require(
        all(a.token_hash != token_hash for a in state.accounts.values()),
        "DUPLICATE_TOKEN",
        "another account already uses this token",
    )
    account = Account(
        id=account_id,
        display_name=payload.get("display_name") or account_id,
        roles=roles,
        token_hash=token_hash,
    )
    new_state = _commit(
        state,
        now=now,
        actor=actor_id,
        action=AuditAction.ACCOUNT_CREATED,
        subjects=(account_id,),
        accounts={**state.accounts, account_id: account},
    )
    return new_state, {"id": account_id, "roles": sorted(r.value for r in roles)}


def op_register_benchmark(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    actor = _require_roles(actor, Role.COMMITTEE)
    specs_raw = payload.get("metric_specs")
    if not isinstance(specs_raw, list):
        raise DomainError("VALIDATION", "metric_specs must be a list")
    try:
        metric_specs = tuple(metric_spec_from_json(m) for m in specs_raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError("VALIDATION", f"bad metric spec: {exc}")
    try:
        visibility = Visibility(payload.get("visibility", "OPEN"))
        policy_raw = payload.get("release_policy") or {}
        release_policy = ReleasePolicy(
            mode=ReleaseMode(policy_raw.get("mode", "PRIVATE")),
            show_per_site=bool(policy_raw.get("show_per_site", False)),
        )
    except ValueError as exc:
        raise DomainError("VALIDATION", str(exc))

    benchmark = Benchmark(
        id=new_id,
        name=_as_str(payload, "name"),
        description=payload.get("description", ""),
        docs_url=payload.get("docs_url", ""),
        preparation_cube=_as_str(payload, "preparation_cube"),
        metrics_cube=_as_str(payload, "metrics_cube"),
        reference_model_cube=_as_str(payload, "reference_model_cube"),
        metric_specs=metric_specs,
        visibility=visibility,
        allowlist=frozenset(payload.get("allowlist", [])),
        release_policy=release_policy,
        state=BenchmarkState.DRAFT,
        committee_id=actor.id,
    )
    defects = validate_benchmark_bundle(benchmark, state.cubes)
    if defects:
        raise DomainError("INVALID_BUNDLE", "; ".join(str(d) for d in defects))
    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.BENCHMARK_REGISTERED,
        subjects=(benchmark.id,),
        benchmarks={**state.benchmarks, benchmark.id: benchmark},
    )
    return new_state, {"id": benchmark.id, "state": benchmark.state.value}


def _get_benchmark(state: StoredState, benchmark_id: str) -> Benchmark:
    benchmark = state.benchmarks.get(benchmark_id)
    if benchmark is None:
        raise DomainError("UNKNOWN_BENCHMARK", f"no benchmark {benchmark_id!r}")
    return benchmark


def _lifecycle_op(action: BenchmarkAction, audit_action: AuditAction):
    def op(
        state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
    ) -> tuple[StoredState, dict]:
        if actor is None:
            raise DomainError("UNAUTHENTICATED", "authentication required")
        benchmark = _get_benchmark(state, _as_str(payload, "benchmark_id"))
        updated = transition_benchmark(benchmark, action, actor.id, actor.roles)
        new_state = _commit(
            state,
            now=now,
            actor=actor.id,
            action=audit_action,
            subjects=(benchmark.id,),
            benchmarks={**state.benchmarks, benchmark.id: updated},
        )
        return new_state, {"id": benchmark.id, "state": updated.state.value}

    return op


op_activate_benchmark = _lifecycle_op(BenchmarkAction.ACTIVATE, AuditAction.BENCHMARK_ACTIVATED)
op_retire_benchmark = _lifecycle_op(BenchmarkAction.RETIRE, AuditAction.BENCHMARK_RETIRED)


def op_register_cube(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    try:
        kind = CubeKind(payload.get("kind"))
    except ValueError:
        raise DomainError("VALIDATION", f"kind must be one of {[k.value for k in CubeKind]}")
    if kind is CubeKind.MODEL:
        actor = _require_roles(actor, Role.MODEL_OWNER)
    else:
        actor = _require_roles(actor, Role.COMMITTEE)

    for required in ("manifest_uid", "image_uid"):
        value = payload.get(required)
        if not value:
            raise DomainError("MISSING_HASH", f"cube registration requires {required}")

    params_raw = payload.get("parameters_uid")
    extra_raw = payload.get("extra_files", [])
    if not isinstance(extra_raw, list):
        raise DomainError("VALIDATION", "extra_files must be a list of {path, uid}")
    seen_paths: set[str] = set()
    extra_files: list[tuple[str, ContentUid]] = []
    for entry in extra_raw:
        path = entry.get("path") if isinstance(entry, dict) else None
        uid = entry.get("uid") if isinstance(entry, dict) else None
        if not isinstance(path, str) or not isinstance(uid, str):
            raise DomainError("VALIDATION", f"bad extra_files entry: {entry!r}")
        if path.startswith("/") or any(seg in ("", ".", "..") for seg in path.split("/")):
            raise DomainError("ILLEGAL_PATH", f"extra file path {path!r}")
        if path in RESERVED_FILENAMES:
            raise DomainError("ILLEGAL_PATH", f"extra file path {path!r} is reserved")
        if path in seen_paths:
            raise DomainError("DUPLICATE_PATH", f"extra file path {path!r} listed twice")
        seen_paths.add(path)
        try:
            extra_files.append((path, ContentUid(uid)))
        except ValueError as exc:
            raise DomainError("VALIDATION", f"extra file {path!r}: {exc}")

    urls_raw = payload.get("download_urls") or {}
    if not isinstance(urls_raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in urls_raw.items()
    ):
        raise DomainError("VALIDATION", "download_urls must map component -> url")

    cube = CubeRecord(
        id=new_id,
        name=_as_str(payload, "name"),
        kind=kind,
        manifest_uid=_as_uid(payload, "manifest_uid"),
        image_ref=_as_str(payload, "image_ref"),
        image_uid=_as_uid(payload, "image_uid"),
        parameters_uid=ContentUid(params_raw) if params_raw else None,
        extra_files=tuple(extra_files),
        owner_id=actor.id,
        registered_at=now,
        download_urls=tuple(sorted(urls_raw.items())),
    )
    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.CUBE_REGISTERED,
        subjects=(cube.id, str(cube.manifest_uid)),
        cubes={**state.cubes, cube.id: cube},
    )
    return new_state, {"id": cube.id}


def op_register_dataset(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    actor = _require_roles(actor, Role.DATA_OWNER)
    generated_uid = _as_uid(payload, "generated_uid")
    _require(
        str(generated_uid) not in state.datasets,
        "DUPLICATE_UID",
        f"dataset {generated_uid} already registered",
    )
    stats_raw = payload.get("statistics") or {}
    if not isinstance(stats_raw, dict):
        raise DomainError("VALIDATION", "statistics must be a map of name -> number")
    if len(stats_raw) > MAX_STATISTICS_ENTRIES:
        raise DomainError(
            "PAYLOAD_TOO_LARGE",
            f"statistics capped at {MAX_STATISTICS_ENTRIES} entries, got {len(stats_raw)}",
        )
    statistics = {k: _as_number(v, f"statistics[{k}]") for k, v in stats_raw.items()}
    sample_count = payload.get("sample_count")
    if not isinstance(sample_count, int) or isinstance(sample_count, bool) or sample_count < 1:
        raise DomainError("VALIDATION", "sample_count must be an integer >= 1")
    prep_cube_id = _as_str(payload, "benchmark_prep_cube")
    prep_cube = state.cubes.get(prep_cube_id)
    if prep_cube is None or prep_cube.kind is not CubeKind.PREPARATION:
        raise DomainError("VALIDATION", f"benchmark_prep_cube {prep_cube_id!r} is not a registered preparation cube")

    dataset = DatasetRecord(
        generated_uid=generated_uid,
        name=_as_str(payload, "name"),
        owner_id=actor.id,
        benchmark_prep_cube=prep_cube_id,
        sample_count=sample_count,
        statistics=statistics,
        registered_at=now,
    )
    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.DATASET_REGISTERED,
        subjects=(str(generated_uid),),
        datasets={**state.datasets, str(generated_uid): dataset},
    )
    return new_state, {"generated_uid": str(generated_uid)}


def op_request_association(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    if actor is None:
        raise DomainError("UNAUTHENTICATED", "authentication required")
    benchmark = _get_benchmark(state, _as_str(payload, "benchmark_id"))
    _require(
        benchmark.state is BenchmarkState.OPERATIONAL,
        "BENCHMARK_NOT_OPERATIONAL",
        f"benchmark {benchmark.id} is {benchmark.state.value}",
    )
    if benchmark.visibility is Visibility.CLOSED and actor.id not in benchmark.allowlist:
        raise DomainError("NOT_ALLOWLISTED", f"{actor.id!r} is not on the benchmark's allowlist")

    subject = _as_str(payload, "subject")
    try:
        subject_kind = SubjectKind(payload.get("subject_kind"))
    except ValueError:
        raise DomainError("VALIDATION", "subject_kind must be DATASET or MODEL")

    if subject_kind is SubjectKind.DATASET:
        dataset = state.datasets.get(subject)
        if dataset is None:
            raise DomainError("UNKNOWN_DATASET", f"no dataset {subject!r}")
        _require(dataset.owner_id == actor.id, "FORBIDDEN", "caller does not own the dataset")
    else:
        cube = state.cubes.get(subject)
        if cube is None:
            raise DomainError("UNKNOWN_CUBE", f"no cube {subject!r}")
        _require(cube.kind is CubeKind.MODEL, "VALIDATION", f"cube {subject!r} is not a model")
        _require(cube.owner_id == actor.id, "FORBIDDEN", "caller does not own the model")

    for existing in state.associations.values():
        if (
            existing.benchmark_id == benchmark.id
            and existing.subject == subject
            and existing.state is not AssociationState.REJECTED
        ):
            raise DomainError(
                "DUPLICATE_ASSOCIATION",
                f"association {existing.id} already {existing.state.value}",
            )

    assoc = Association(
        id=new_id,
        benchmark_id=benchmark.id,
        subject=subject,
        subject_kind=subject_kind,
        state=AssociationState.REQUESTED,
        requested_by=actor.id,
        requested_at=now,
    )
    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.ASSOCIATION_REQUESTED,
        subjects=(assoc.id, benchmark.id, subject),
        associations={**state.associations, assoc.id: assoc},
    )
    return new_state, {"id": assoc.id, "state": assoc.state.value}


def op_decide_association(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    if actor is None:
        raise DomainError("UNAUTHENTICATED", "authentication required")
    assoc_id = _as_str(payload, "association_id")
    assoc = state.associations.get(assoc_id)
    if assoc is None:
        raise DomainError("UNKNOWN_ASSOCIATION", f"no association {assoc_id!r}")
    decision = payload.get("decision")
    if decision not in ("approve", "reject"):
        raise DomainError("VALIDATION", 'decision must be "approve" or "reject"')
    benchmark = _get_benchmark(state, assoc.benchmark_id)
    action = AssociationAction.APPROVE if decision == "approve" else AssociationAction.REJECT
    decided = transition_association(assoc, action, actor.id, actor.roles, benchmark, now)
    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.ASSOCIATION_DECIDED,
        subjects=(assoc.id, decided.state.value),
        associations={**state.associations, assoc.id: decided},
    )
    return new_state, {"id": assoc.id, "state": decided.state.value}


def op_submit_result(
    state: StoredState, actor: Account | None, payload: dict, now: datetime, new_id: str
) -> tuple[StoredState, dict]:
    actor = _require_roles(actor, Role.DATA_OWNER)
    benchmark = _get_benchmark(state, _as_str(payload, "benchmark_id"))
    dataset_uid = _as_uid(payload, "dataset_uid")
    dataset = state.datasets.get(str(dataset_uid))
    if dataset is None:
        raise DomainError("UNKNOWN_DATASET", f"no dataset {dataset_uid}")
    _require(dataset.owner_id == actor.id, "FORBIDDEN", "caller does not own the dataset")
    model_cube_id = _as_str(payload, "model_cube_id")

    for key in ("model_approved_at", "result_approved_at"):
        if not payload.get(key):
            raise DomainError("INVALID_RESULT", f"missing approval timestamp {key}")
    try:
        model_approved_at = parse_utc(payload["model_approved_at"])
        result_approved_at = parse_utc(payload["result_approved_at"])
    except ValueError as exc:
        raise DomainError("INVALID_RESULT", f"bad approval timestamp: {exc}")

    eh_raw = payload.get("executed_hashes")
    if not isinstance(eh_raw, dict) or set(eh_raw) != {"prep", "model", "metrics_cube"}:
        raise DomainError("INVALID_RESULT", "executed_hashes must carry prep, model, metrics_cube")
    try:
        executed = ExecutedHashes(
            prep=ContentUid(eh_raw["prep"]),
            model=ContentUid(eh_raw["model"]),
            metrics_cube=ContentUid(eh_raw["metrics_cube"]),
        )
    except ValueError as exc:
        raise DomainError("INVALID_RESULT", f"bad executed hash: {exc}")

    metrics_raw = payload.get("metrics")
    if not isinstance(metrics_raw, dict) or not metrics_raw:
        raise DomainError("INVALID_RESULT", "metrics must be a non-empty map")
    metrics = {k: _as_number(v, f"metrics[{k}]") for k, v in metrics_raw.items()}
    sample_count = payload.get("sample_count")
    if not isinstance(sample_count, int) or isinstance(sample_count, bool):
        raise DomainError("INVALID_RESULT", "sample_count must be an integer")

    for existing in state.results.values():
        if existing.triple() == (benchmark.id, str(dataset_uid), model_cube_id):
            raise DomainError("DUPLICATE_RESULT", f"triple already has result {existing.id}")

    def _approved(subject: str, kind: SubjectKind) -> bool:
        return any(
            a.benchmark_id == benchmark.id
            and a.subject == subject
            and a.subject_kind is kind
            and a.state is AssociationState.APPROVED
            for a in state.associations.values()
        )

    defect_extra = []
    if not _approved(str(dataset_uid), SubjectKind.DATASET):
        defect_extra.append("NO_APPROVED_DATASET_ASSOCIATION")
    if not _approved(model_cube_id, SubjectKind.MODEL):
        defect_extra.append("NO_APPROVED_MODEL_ASSOCIATION")

    result = EvaluationResult(
        id=new_id,
        benchmark_id=benchmark.id,
        dataset_uid=dataset_uid,
        model_cube_id=model_cube_id,
        metrics=metrics,
        sample_count=sample_count,
        executed_hashes=executed,
        operator_id=actor.id,
        model_approved_at=model_approved_at,
        result_approved_at=result_approved_at,
        uploaded_at=now,
    )
    defects = [str(d) for d in validate_result(result, benchmark, state.cubes)] + defect_extra
    if defects:
        raise DomainError("INVALID_RESULT", "; ".join(defects))

    new_state = _commit(
        state,
        now=now,
        actor=actor.id,
        action=AuditAction.RESULT_UPLOADED,
        subjects=(result.id, benchmark.id, str(dataset_uid), model_cube_id),
        results={**state.results, result.id: result},
    )
    return new_state, {"id": result.id}


Mutation = Callable[[StoredState, Account | None, dict, datetime, str], tuple[StoredState, dict]]

OPS: dict[str, Mutation] = {
    "create_account": op_create_account,
    "register_benchmark": op_register_benchmark,
    "activate_benchmark": op_activate_benchmark,
    "retire_benchmark": op_retire_benchmark,
    "register_cube": op_register_cube,
    "register_dataset": op_register_dataset,
    "request_association": op_request_association,
    "decide_association": op_decide_association,
    "submit_result": op_submit_result,
}


def replay_journal(entries: list[dict]) -> StoredState:
    """Re-apply journaled mutations to an empty state.

    Each entry carries {op, actor_id, payload, now, new_id}; actors are
    re-resolved against the evolving state, so the replayed registry is
    bit-identical to the one the mutations originally produced.
    """
    state = StoredState()
    for entry in entries:
        actor = state.accounts.get(entry["actor_id"]) if entry["actor_id"] else None
        op = OPS[entry["op"]]
        state, _ = op(state, actor, entry["payload"], parse_utc(entry["now"]), entry["new_id"])
    return state


# --------------------------------------------------------------------------
# Queries (read-only)
# --------------------------------------------------------------------------


def query_pending(state: StoredState, actor: Account, dataset_uid: str) -> dict:
    dataset = state.datasets.get(dataset_uid)
    if dataset is None:
        raise DomainError("UNKNOWN_DATASET", f"no dataset {dataset_uid!r}")
    _require(dataset.owner_id == actor.id, "FORBIDDEN", "caller does not own the dataset")
    tasks = pending_tasks(state.view(), dataset_uid)
    out = []
    for task in tasks:
        benchmark = state.benchmarks[task.benchmark_id]
        out.append(
            {
                "benchmark_id": task.benchmark_id,
                "dataset_uid": str(task.dataset_uid),
                "model_cube_id": task.model_cube_id,
                "benchmark": benchmark_to_json(benchmark),
                "model_cube": cube_to_json(state.cubes[task.model_cube_id]),
                "prep_cube": cube_to_json(state.cubes[benchmark.preparation_cube]),
                "metrics_cube": cube_to_json(state.cubes[benchmark.metrics_cube]),
            }
        )
    return {"tasks": out}


def build_full_report(state: StoredState, benchmark: Benchmark) -> BenchmarkReport:
    results = sorted(
        (r for r in state.results.values() if r.benchmark_id == benchmark.id),
        key=lambda r: (r.model_cube_id, str(r.dataset_uid)),
    )
    by_model: dict[str, list[EvaluationResult]] = {}
    for result in results:
        by_model.setdefault(result.model_cube_id, []).append(result)

    def cube_name(cube_id: str) -> str:
        cube = state.cubes.get(cube_id)
        return cube.name if cube else cube_id

    def cube_owner(cube_id: str) -> str:
        cube = state.cubes.get(cube_id)
        return cube.owner_id if cube else ""

    aggregates = []
    for model_id, model_results in sorted(by_model.items()):
        metrics: dict[str, Any] = {}
        for spec in benchmark.metric_specs:
            carrying = [r for r in model_results if spec.name in r.metrics]
            if carrying:
                metrics[spec.name] = aggregate_results(carrying, spec)
        aggregates.append(
            ModelAggregate(
                model_cube_id=model_id,
                model_name=cube_name(model_id),
                model_owner_id=cube_owner(model_id),
                metrics=metrics,
            )
        )

    site_rows = tuple(
        SiteRow(
            model_cube_id=r.model_cube_id,
            model_name=cube_name(r.model_cube_id),
            model_owner_id=cube_owner(r.model_cube_id),
            dataset_uid=str(r.dataset_uid),
            dataset_name=(
                state.datasets[str(r.dataset_uid)].name
                if str(r.dataset_uid) in state.datasets
                else str(r.dataset_uid)
            ),
            dataset_owner_id=(
                state.datasets[str(r.dataset_uid)].owner_id
                if str(r.dataset_uid) in state.datasets
                else ""
            ),
            metrics=dict(r.metrics),
            sample_count=r.sample_count,
        )
        for r in results
    )
    return BenchmarkReport(
        benchmark_id=benchmark.id,
        benchmark_name=benchmark.name,
        aggregates=tuple(aggregates),
        site_rows=site_rows,
    )


def viewer_for(state: StoredState, actor: Account, benchmark: Benchmark) -> ReportViewer:
    return ReportViewer(
        account_id=actor.id,
        roles=actor.roles,
        owned_model_ids=frozenset(
            c.id for c in state.cubes.values() if c.kind is CubeKind.MODEL and c.owner_id == actor.id
        ),
        owned_dataset_uids=frozenset(
            uid for uid, ds in state.datasets.items() if ds.owner_id == actor.id
        ),
        is_committee=(actor.id == benchmark.committee_id and Role.COMMITTEE in actor.roles),
    )


def query_results(state: StoredState, actor: Account, benchmark_id: str) -> BenchmarkReport:
    benchmark = _get_benchmark(state, benchmark_id)
    report = build_full_report(state, benchmark)
    return apply_release_policy(report, benchmark.release_policy, viewer_for(state, actor, benchmark))


def query_associations(state: StoredState, actor: Account, state_filter: str | None) -> list[dict]:
    """Associations visible to the caller: own requests, plus the whole
    queue for benchmarks the caller chairs (operators see everything)."""
    chaired = {
        b.id
        for b in state.benchmarks.values()
        if b.committee_id == actor.id and Role.COMMITTEE in actor.roles
    }
    wanted = None
    if state_filter:
        try:
            wanted = AssociationState(state_filter)
        except ValueError:
            raise DomainError("VALIDATION", f"unknown association state {state_filter!r}")

    items = []
    for assoc in sorted(state.associations.values(), key=lambda a: (a.requested_at, a.id)):
        if wanted is not None and assoc.state is not wanted:
            continue
        visible = (
            Role.PLATFORM_OPERATOR in actor.roles
            or assoc.benchmark_id in chaired
            or assoc.requested_by == actor.id
        )
        if not visible:
            continue
        body = association_to_json(assoc)
        benchmark = state.benchmarks.get(assoc.benchmark_id)
        body["benchmark_name"] = benchmark.name if benchmark else assoc.benchmark_id
        if assoc.subject_kind is SubjectKind.DATASET:
            dataset = state.datasets.get(assoc.subject)
            body["subject_name"] = dataset.name if dataset else assoc.subject
            body["pinned_hashes"] = {"generated_uid": assoc.subject}
        else:
            cube = state.cubes.get(assoc.subject)
            body["subject_name"] = cube.name if cube else assoc.subject
            body["pinned_hashes"] = (
                {
                    "manifest_uid": str(cube.manifest_uid),
                    "image_uid": str(cube.image_uid),
                    "parameters_uid": str(cube.parameters_uid) if cube.parameters_uid else None,
                }
                if cube
                else {}
            )
        items.append(body)
    return items


def find_account_by_token_hash(state: StoredState, token_hash: ContentUid) -> Account | None:
    for account in state.accounts.values():
        if account.token_hash == token_hash:
            return account
    return None

