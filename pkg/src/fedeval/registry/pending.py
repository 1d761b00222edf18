"""Pending-work computation: which triples still need an evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError
from .model import (
    Association,
    AssociationState,
    Benchmark,
    BenchmarkState,
    CubeRecord,
    DatasetRecord,
    EvaluationResult,
    EvaluationTask,
    SubjectKind,
)
from .uids import ContentUid


@dataclass(frozen=True)
class RegistryView:
    """Read-only snapshot of the registry the pure operations query."""

    benchmarks: Mapping[str, Benchmark] = field(default_factory=dict)
    cubes: Mapping[str, CubeRecord] = field(default_factory=dict)
    datasets: Mapping[str, DatasetRecord] = field(default_factory=dict)
    associations: Mapping[str, Association] = field(default_factory=dict)
    results: Mapping[str, EvaluationResult] = field(default_factory=dict)


def pending_tasks(view: RegistryView, dataset_uid: ContentUid | str) -> list[EvaluationTask]:
    """All (benchmark, dataset, model) triples awaiting evaluation.

    A triple qualifies iff the benchmark is OPERATIONAL, both the dataset's
    and the model's associations with it are APPROVED, and no result exists
    for the triple yet. Order is deterministic: benchmark id, then model id.
    """
    if dataset_uid not in view.datasets:
        raise DomainError("UNKNOWN_DATASET", f"no dataset registered with uid {dataset_uid}")

    approved_benchmarks: set[str] = set()
    approved_models: dict[str, set[str]] = {}
    for assoc in view.associations.values():
        if assoc.state is not AssociationState.APPROVED:
            continue
        if assoc.subject_kind is SubjectKind.DATASET and assoc.subject == dataset_uid:
            approved_benchmarks.add(assoc.benchmark_id)
        elif assoc.subject_kind is SubjectKind.MODEL:
            approved_models.setdefault(assoc.benchmark_id, set()).add(assoc.subject)

    done = {r.triple() for r in view.results.values()}

    tasks: list[EvaluationTask] = []
    for bid in sorted(approved_benchmarks):
        benchmark = view.benchmarks.get(bid)
        if benchmark is None or benchmark.state is not BenchmarkState.OPERATIONAL:
            continue
        for model_id in sorted(approved_models.get(bid, ())):
            if (bid, str(dataset_uid), model_id) not in done:
                tasks.append(
                    EvaluationTask(
                        benchmark_id=bid,
                        dataset_uid=ContentUid(str(dataset_uid)),
                        model_cube_id=model_id,
                    )
                )
    return tasks
