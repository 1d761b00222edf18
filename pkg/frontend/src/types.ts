/** Wire types of the /api/v1 JSON API, field-for-field. */

export interface Account {
  id: string;
  display_name: string;
  roles: string[];
}

export interface BenchmarkSummary {
  id: string;
  name: string;
  description: string;
  state: string;
  visibility: string;
  release_policy: { mode: string; show_per_site: boolean };
  committee_id: string;
}

/** An association enriched by the server for queue display. */
export interface QueueItem {
  id: string;
  benchmark_id: string;
  benchmark_name: string;
  subject: string;
  subject_kind: "DATASET" | "MODEL";
  subject_name: string;
  state: "REQUESTED" | "APPROVED" | "REJECTED";
  requested_by: string;
  requested_at: string;
  /** Verbatim hex digests; rendering may abbreviate, the copy action must not. */
  pinned_hashes: Record<string, string | null>;
}

export interface AggregateValue {
  value: number;
  site_count: number;
  total_samples: number;
}

export interface ModelAggregate {
  model_cube_id: string;
  model_name: string;
  model_owner_id: string;
  metrics: Record<string, AggregateValue>;
}

export interface SiteRow {
  model_cube_id: string;
  model_name: string;
  model_owner_id: string;
  dataset_uid: string;
  dataset_name: string;
  dataset_owner_id: string;
  metrics: Record<string, number>;
  sample_count: number;
}

export interface ResultsReport {
  benchmark_id: string;
  benchmark_name: string;
  aggregates: ModelAggregate[];
  site_rows: SiteRow[];
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
