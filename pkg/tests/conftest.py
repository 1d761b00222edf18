"""Shared builders for registry entities with sensible defaults."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from fedeval.registry import (
    Association,
    AssociationState,
    Benchmark,
    BenchmarkState,
    ContentUid,
    CubeKind,
    CubeRecord,
    DatasetRecord,
    EvaluationResult,
    MetricSpec,
    RegistryView,
    ReleasePolicy,
    hash_bytes,
)
from fedeval.registry.model import ExecutedHashes, SubjectKind

TS = datetime(2026, 1, 2, 3, 4, 5, tzinfo=timezone.utc)


def uid_of(text: str) -> ContentUid:
    return hash_bytes(text.encode())


def make_cube(cube_id: str, kind: CubeKind = CubeKind.MODEL, owner: str = "mona", **kw) -> CubeRecord:
    defaults = dict(
        id=cube_id,
        name=f"cube {cube_id}",
        kind=kind,
        manifest_uid=uid_of(f"{cube_id}/manifest"),
        image_ref=f"example.org/{cube_id}:1",
        image_uid=uid_of(f"{cube_id}/image"),
        owner_id=owner,
        registered_at=TS,
    )
    defaults.update(kw)
    return CubeRecord(**defaults)


def make_benchmark(bench_id: str = "bench-1", committee: str = "carol", **kw) -> Benchmark:
    defaults = dict(
        id=bench_id,
        name=f"benchmark {bench_id}",
        description="synthetic tabular binary classification",
        docs_url="https://example.org/docs",
        preparation_cube="cube-prep",
        metrics_cube="cube-metrics",
        reference_model_cube="cube-ref",
        metric_specs=(MetricSpec(name="accuracy", range=(0.0, 1.0)),),
        committee_id=committee,
        state=BenchmarkState.OPERATIONAL,
    )
    defaults.update(kw)
    return Benchmark(**defaults)


def standard_cubes(committee: str = "carol") -> dict[str, CubeRecord]:
    return {
        "cube-prep": make_cube("cube-prep", CubeKind.PREPARATION, owner=committee),
        "cube-metrics": make_cube("cube-metrics", CubeKind.METRICS, owner=committee),
        "cube-ref": make_cube("cube-ref", CubeKind.MODEL, owner=committee),
    }


def make_dataset(uid: ContentUid | None = None, owner: str = "dana", **kw) -> DatasetRecord:
    defaults = dict(
        generated_uid=uid or uid_of("dataset-1"),
        name="site data",
        owner_id=owner,
        benchmark_prep_cube="cube-prep",
        sample_count=100,
        statistics={"n": 100.0, "positive_fraction": 0.5},
        registered_at=TS,
    )
    defaults.update(kw)
    return DatasetRecord(**defaults)


def make_assoc(
    assoc_id: str,
    benchmark_id: str,
    subject: str,
    subject_kind: SubjectKind,
    state: AssociationState = AssociationState.REQUESTED,
    requested_by: str = "dana",
) -> Association:
    terminal = state is not AssociationState.REQUESTED
    return Association(
        id=assoc_id,
        benchmark_id=benchmark_id,
        subject=subject,
        subject_kind=subject_kind,
        state=state,
        requested_by=requested_by,
        requested_at=TS,
        decided_by="carol" if terminal else None,
        decided_at=TS if terminal else None,
    )


def make_result(
    result_id: str,
    benchmark: Benchmark,
    dataset_uid: ContentUid,
    model_cube_id: str,
    cubes: dict[str, CubeRecord],
    metrics: dict[str, float] | None = None,
    sample_count: int = 100,
    **kw,
) -> EvaluationResult:
    defaults = dict(
        id=result_id,
        benchmark_id=benchmark.id,
        dataset_uid=dataset_uid,
        model_cube_id=model_cube_id,
        metrics=metrics if metrics is not None else {"accuracy": 0.8},
        sample_count=sample_count,
        executed_hashes=ExecutedHashes(
            prep=cubes[benchmark.preparation_cube].manifest_uid,
            model=cubes[model_cube_id].manifest_uid,
            metrics_cube=cubes[benchmark.metrics_cube].manifest_uid,
        ),
        operator_id="dana",
        model_approved_at=TS,
        result_approved_at=TS,
        uploaded_at=TS,
    )
    defaults.update(kw)
    return EvaluationResult(**defaults)


@pytest.fixture
def view_builder():
    def build(**collections) -> RegistryView:
        return RegistryView(**collections)

    return build
