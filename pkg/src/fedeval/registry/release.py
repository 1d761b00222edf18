"""Release-policy filtering of benchmark reports.

The committee of a benchmark always sees the full report. Everyone else
sees the subset their role and the committee's policy grant; data owners
always keep sight of the rows produced from their own dataset (they
approved those uploads in the first place).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .aggregation import AggregateValue
from .model import ReleaseMode, ReleasePolicy, Role


@dataclass(frozen=True)
class SiteRow:
    """One uploaded result, as shown in the per-site drill-down."""

    model_cube_id: str
    model_name: str
    model_owner_id: str
    dataset_uid: str
    dataset_name: str
    dataset_owner_id: str
    metrics: Mapping[str, float]
    sample_count: int


@dataclass(frozen=True)
class ModelAggregate:
    model_cube_id: str
    model_name: str
    model_owner_id: str
    metrics: Mapping[str, AggregateValue]


@dataclass(frozen=True)
class BenchmarkReport:
    benchmark_id: str
    benchmark_name: str
    aggregates: tuple[ModelAggregate, ...]
    site_rows: tuple[SiteRow, ...]


@dataclass(frozen=True)
class ReportViewer:
    """Who is looking: identity, roles, and what they own."""

    account_id: str
    roles: frozenset[Role]
    owned_model_ids: frozenset[str] = frozenset()
    owned_dataset_uids: frozenset[str] = frozenset()
    is_committee: bool = False


def apply_release_policy(
    report: BenchmarkReport,
    policy: ReleasePolicy,
    viewer: ReportViewer,
) -> BenchmarkReport:
    """Project the report down to what the viewer may see."""
    if viewer.is_committee:
        return report

    own_dataset_rows = tuple(
        row for row in report.site_rows if row.dataset_uid in viewer.owned_dataset_uids
    )

    if policy.mode is ReleaseMode.PRIVATE:
        return replace(report, aggregates=(), site_rows=own_dataset_rows)

    if policy.mode is ReleaseMode.OWNER_SCOPED:
        report_models = {agg.model_cube_id for agg in report.aggregates}
        owns_model_here = bool(report_models & viewer.owned_model_ids)
        aggregates = report.aggregates if owns_model_here else ()
        rows = tuple(
            row
            for row in report.site_rows
            if row.dataset_uid in viewer.owned_dataset_uids
            or (policy.show_per_site and row.model_cube_id in viewer.owned_model_ids)
        )
        return replace(report, aggregates=aggregates, site_rows=rows)

    # PUBLIC: aggregates for all; per-site rows only when the policy says so.
    rows = report.site_rows if policy.show_per_site else own_dataset_rows
    return replace(report, site_rows=rows)
