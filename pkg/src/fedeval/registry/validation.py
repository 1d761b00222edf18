"""Bundle and result validators. Defects are returned, never raised."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .model import (
    Benchmark,
    CubeKind,
    CubeRecord,
    EvaluationResult,
    Visibility,
)


@dataclass(frozen=True)
class Defect:
    """One violated check: a stable code plus the offending subject."""

    code: str
    subject: str = ""
    detail: str = ""

    def __str__(self) -> str:
        core = f"{self.code}({self.subject})" if self.subject else self.code
        return f"{core}: {self.detail}" if self.detail else core


_BUNDLE_SLOTS = (
    ("preparation_cube", CubeKind.PREPARATION),
    ("metrics_cube", CubeKind.METRICS),
    ("reference_model_cube", CubeKind.MODEL),
)


def validate_benchmark_bundle(
    benchmark: Benchmark, cubes: Mapping[str, CubeRecord]
) -> list[Defect]:
    """Check the asset bundle is complete and coherent; [] means ok."""
    defects: list[Defect] = []
    for slot, expected_kind in _BUNDLE_SLOTS:
        cube_id = getattr(benchmark, slot)
        cube = cubes.get(cube_id)
        if cube is None:
            defects.append(Defect("MISSING_ASSET", slot, f"no cube with id {cube_id!r}"))
        elif cube.kind is not expected_kind:
            defects.append(
                Defect("WRONG_CUBE_KIND", slot, f"{cube_id!r} is {cube.kind.value}")
            )
    if not benchmark.metric_specs:
        defects.append(Defect("NO_METRIC_SPECS"))
    seen: set[str] = set()
    for spec in benchmark.metric_specs:
        if spec.name in seen:
            defects.append(Defect("DUPLICATE_METRIC", spec.name))
        seen.add(spec.name)
    if not benchmark.docs_url:
        defects.append(Defect("MISSING_DOCS"))
    if benchmark.visibility is Visibility.CLOSED and not benchmark.allowlist:
        defects.append(Defect("EMPTY_ALLOWLIST"))
    return defects


def validate_result(
    result: EvaluationResult,
    benchmark: Benchmark,
    cubes: Mapping[str, CubeRecord],
) -> list[Defect]:
    """Check a result against its benchmark's contract; [] means ok.

    Verifies metric names and ranges, approval timestamp ordering, a
    positive sample count, and that the hashes executed on the data
    owner's machine match the cubes currently registered for the
    benchmark and the model.
    """
    defects: list[Defect] = []
    specs = {spec.name: spec for spec in benchmark.metric_specs}
    for name, value in result.metrics.items():
        spec = specs.get(name)
        if spec is None:
            defects.append(Defect("UNKNOWN_METRIC", name))
            continue
        lo, hi = spec.range
        if not isinstance(value, (int, float)) or math.isnan(value) or not lo <= value <= hi:
            defects.append(
                Defect("OUT_OF_RANGE", name, f"{value!r} outside [{lo}, {hi}]")
            )

    if not result.model_approved_at <= result.result_approved_at <= result.uploaded_at:
        defects.append(
            Defect(
                "TIMESTAMP_ORDER",
                result.id,
                "expected model_approved_at <= result_approved_at <= uploaded_at",
            )
        )
    if result.sample_count < 1:
        defects.append(Defect("INVALID_SAMPLE_COUNT", result.id, str(result.sample_count)))

    expected = (
        ("prep", benchmark.preparation_cube, result.executed_hashes.prep),
        ("model", result.model_cube_id, result.executed_hashes.model),
        ("metrics_cube", benchmark.metrics_cube, result.executed_hashes.metrics_cube),
    )
    for label, cube_id, executed in expected:
        cube = cubes.get(cube_id)
        if cube is None:
            defects.append(Defect("MISSING_ASSET", label, f"no cube with id {cube_id!r}"))
        elif cube.manifest_uid != executed:
            defects.append(
                Defect("HASH_MISMATCH", label, f"executed {executed} != registered {cube.manifest_uid}")
            )
    return defects
