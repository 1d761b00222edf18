/** Leaderboard view model: exactly the server's policy-filtered report.
 *
 * No client-side widening: rows and drill-down exist iff the payload
 * carries them; an empty payload renders the empty state.
 */

import type { AggregateValue, ResultsReport, SiteRow } from "./types.js";

export interface LeaderboardRow {
  model_cube_id: string;
  model_name: string;
  metrics: Record<string, AggregateValue>;
  site_count: number;
  total_samples: number;
}

export interface LeaderboardView {
  benchmark_name: string;
  empty: boolean;
  metricNames: string[];
  rows: LeaderboardRow[];
  hasDrillDown: boolean;
  siteRows: SiteRow[];
}

export function buildLeaderboard(report: ResultsReport): LeaderboardView {
  const metricNames = [
    ...new Set(report.aggregates.flatMap((agg) => Object.keys(agg.metrics))),
  ].sort();
  const rows = report.aggregates.map((agg) => {
    const firstMetric = Object.values(agg.metrics)[0];
    return {
      model_cube_id: agg.model_cube_id,
      model_name: agg.model_name,
      metrics: agg.metrics,
      site_count: firstMetric ? firstMetric.site_count : 0,
      total_samples: firstMetric ? firstMetric.total_samples : 0,
    };
  });
  // best first on the first metric when present
  const primary = metricNames[0];
  if (primary !== undefined) {
    rows.sort(
      (a, b) => (b.metrics[primary]?.value ?? -Infinity) - (a.metrics[primary]?.value ?? -Infinity),
    );
  }
  return {
    benchmark_name: report.benchmark_name,
    empty: rows.length === 0 && report.site_rows.length === 0,
    metricNames,
    rows,
    hasDrillDown: report.site_rows.length > 0,
    siteRows: report.site_rows,
  };
}
