"""Multi-site metric aggregation.

WEIGHTED_MEAN is the virtual-test-set combiner: sum(v_i * n_i) / sum(n_i).
Arithmetic is duck-typed on the metric values, so exact number types
(int, fractions.Fraction) aggregate without rounding; this is what makes
the decomposability contract of MetricSpec hold exactly -- the weighted
mean of per-site count ratios is the pooled ratio over the union of
samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .model import AggregationMethod, EvaluationResult, MetricSpec


@dataclass(frozen=True)
class AggregateValue:
    value: float
    site_count: int
    total_samples: int


def aggregate_results(
    results: Sequence[EvaluationResult],
    spec: MetricSpec,
    method: AggregationMethod | None = None,
) -> AggregateValue:
    """Combine one metric across the per-site results of a single model.

    ``method`` defaults to the spec's configured aggregation. Every result
    must carry the metric (MISSING_METRIC otherwise); results must be
    non-empty (EMPTY_INPUT).
    """
    if not results:
        raise DomainError("EMPTY_INPUT", f"no results to aggregate for {spec.name!r}")
    for r in results:
        if spec.name not in r.metrics:
            raise DomainError(
                "MISSING_METRIC", f"result {r.id} lacks metric {spec.name!r}"
            )
    method = method or spec.aggregation
    values = [r.metrics[spec.name] for r in results]
    counts = [r.sample_count for r in results]
    total = sum(counts)

    if method is AggregationMethod.WEIGHTED_MEAN:
        if total <= 0:
            raise DomainError("EMPTY_INPUT", "total sample count is zero")
        value = sum(v * n for v, n in zip(values, counts)) / total
    elif method is AggregationMethod.UNWEIGHTED_MEAN:
        value = sum(values) / len(values)
    elif method is AggregationMethod.MIN:
        value = min(values)
    elif method is AggregationMethod.MAX:
        value = max(values)
    else:  # pragma: no cover - enum is closed
        raise DomainError("UNKNOWN_METHOD", str(method))

    return AggregateValue(value=value, site_count=len(results), total_samples=total)
