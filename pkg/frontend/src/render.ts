/** HTML-string rendering. State lives elsewhere; these are pure views. */

import type { LeaderboardView } from "./leaderboard.js";
import type { QueueState } from "./queue.js";
import type { BenchmarkSummary, QueueItem } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function abbreviate(hash: string): string {
  return hash.length > 16 ? `${hash.slice(0, 8)}…${hash.slice(-8)}` : hash;
}

/** Hashes display abbreviated but carry the verbatim digest for copying. */
function hashChip(label: string, hash: string | null): string {
  if (!hash) {
    return "";
  }
  const safe = escapeHtml(hash);
  return (
    `<span class="hash" title="${safe}">` +
    `${escapeHtml(label)}: <code>${escapeHtml(abbreviate(hash))}</code> ` +
    `<button class="copy" data-copy="${safe}">copy</button></span>`
  );
}

function queueCard(item: QueueItem, error: string | undefined, busy: boolean): string {
  const hashes = Object.entries(item.pinned_hashes)
    .map(([label, hash]) => hashChip(label, hash))
    .join(" ");
  const errorLine = error
    ? `<p class="error">decision failed: ${escapeHtml(error)}</p>`
    : "";
  const disabled = busy ? " disabled" : "";
  return `
<article class="queue-item" data-association="${escapeHtml(item.id)}">
  <header>
    <strong>${escapeHtml(item.subject_name)}</strong>
    <span class="kind">${escapeHtml(item.subject_kind)}</span>
    for <em>${escapeHtml(item.benchmark_name)}</em>
  </header>
  <p>requested by ${escapeHtml(item.requested_by)} at ${escapeHtml(item.requested_at)}</p>
  <p class="hashes">${hashes}</p>
  ${errorLine}
  <footer>
    <button class="approve" data-decide="approve" data-id="${escapeHtml(item.id)}"${disabled}>Approve</button>
    <button class="reject" data-decide="reject" data-id="${escapeHtml(item.id)}"${disabled}>Reject</button>
  </footer>
</article>`;
}

export function renderQueue(state: QueueState): string {
  if (state.items.length === 0 && state.inFlight.size === 0) {
    return `<p class="empty-state">No association requests waiting for a decision.</p>`;
  }
  const cards = state.items
    .map((item) => queueCard(item, state.errors.get(item.id), state.inFlight.has(item.id)))
    .join("\n");
  const refreshed = state.lastRefreshed
    ? `<p class="refreshed">last refreshed ${escapeHtml(state.lastRefreshed)}</p>`
    : "";
  return `${cards}\n${refreshed}`;
}

export function renderLeaderboard(view: LeaderboardView): string {
  if (view.empty) {
    return (
      `<p class="empty-state">No results are visible for this benchmark under its ` +
      `release policy and your role.</p>`
    );
  }
  const header = ["model", ...view.metricNames, "sites", "samples"]
    .map((h) => `<th>${escapeHtml(h)}</th>`)
    .join("");
  const rows = view.rows
    .map((row) => {
      const cells = view.metricNames
        .map((name) => {
          const agg = row.metrics[name];
          return `<td>${agg ? agg.value.toFixed(6) : "—"}</td>`;
        })
        .join("");
      return (
        `<tr><td>${escapeHtml(row.model_name)}</td>${cells}` +
        `<td>${row.site_count}</td><td>${row.total_samples}</td></tr>`
      );
    })
    .join("\n");
  const table = `<table class="leaderboard"><thead><tr>${header}</tr></thead><tbody>${rows}</tbody></table>`;
  if (!view.hasDrillDown) {
    return table;
  }
  const metricNames = [...new Set(view.siteRows.flatMap((r) => Object.keys(r.metrics)))].sort();
  const siteHeader = ["model", "dataset", "samples", ...metricNames]
    .map((h) => `<th>${escapeHtml(h)}</th>`)
    .join("");
  const siteRows = view.siteRows
    .map((row) => {
      const cells = metricNames
        .map((name) => `<td>${name in row.metrics ? row.metrics[name]!.toFixed(6) : "—"}</td>`)
        .join("");
      return (
        `<tr><td>${escapeHtml(row.model_name)}</td><td>${escapeHtml(row.dataset_name)}</td>` +
        `<td>${row.sample_count}</td>${cells}</tr>`
      );
    })
    .join("\n");
  return (
    `${table}\n<details class="drill-down"><summary>Per-site results</summary>` +
    `<table><thead><tr>${siteHeader}</tr></thead><tbody>${siteRows}</tbody></table></details>`
  );
}

export function renderBenchmarkOptions(benchmarks: BenchmarkSummary[], selected: string): string {
  return benchmarks
    .map(
      (b) =>
        `<option value="${escapeHtml(b.id)}"${b.id === selected ? " selected" : ""}>` +
        `${escapeHtml(b.name)} (${escapeHtml(b.state)})</option>`,
    )
    .join("");
}

export function renderIdentity(name: string, roles: string[]): string {
  return `signed in as <strong>${escapeHtml(name)}</strong> [${roles.map(escapeHtml).join(", ")}]`;
}
