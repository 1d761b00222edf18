/** Shared test plumbing: recorded fixture + a scriptable fetch. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type { QueueItem, ResultsReport } from "../src/types.js";

export interface RecordedFixture {
  queue_association_id: string;
  queue_payload: QueueItem[];
  results_committee: ResultsReport;
  results_private_empty: ResultsReport;
  results_public_viewer: ResultsReport;
  cli_request: { method: string; path: string; body: string };
  dashboard_request: { method: string; path: string; body: string };
  parity: boolean;
}

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture(): RecordedFixture {
  return JSON.parse(
    readFileSync(join(here, "fixtures", "recorded_server.json"), "utf-8"),
  ) as RecordedFixture;
}

export interface CapturedRequest {
  method: string;
  path: string;
  body: string;
  authorization: string;
}

export interface FakeRoute {
  status?: number;
  payload: unknown;
}

/** A fetch stub that captures requests and serves canned responses by
 *  "<METHOD> <path>" key (paths are absolute, query included). */
export function fakeFetch(routes: Record<string, FakeRoute | FakeRoute[]>) {
  const captured: CapturedRequest[] = [];
  const served: Record<string, number> = {};
  const fetchFn: FetchLike = async (input, init) => {
    const url = new URL(input);
    const path = url.pathname + url.search;
    const method = init?.method ?? "GET";
    const headers = (init?.headers ?? {}) as Record<string, string>;
    captured.push({
      method,
      path,
      body: typeof init?.body === "string" ? init.body : "",
      authorization: headers["Authorization"] ?? "",
    });
    const key = `${method} ${path}`;
    const route = routes[key];
    if (route === undefined) {
      return new Response(
        JSON.stringify({ error: { code: "NOT_FOUND", message: `no route ${key}` } }),
        { status: 404 },
      );
    }
    const sequence = Array.isArray(route) ? route : [route];
    const index = Math.min(served[key] ?? 0, sequence.length - 1);
    served[key] = (served[key] ?? 0) + 1;
    const step = sequence[index]!;
    return new Response(JSON.stringify(step.payload), { status: step.status ?? 200 });
  };
  return { fetchFn, captured };
}
