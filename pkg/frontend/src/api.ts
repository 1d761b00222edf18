/** Fetch-based client for the coordination server.
 *
 * The token lives in memory only; every displayed fact is the body of one
 * of these calls, verbatim. The fetch function is injectable for tests.
 */

import type {
  Account,
  ApiErrorBody,
  BenchmarkSummary,
  QueueItem,
  ResultsReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body === undefined ? {} : { "Content-Type": "application/json" }),
      },
      ...(body === undefined ? {} : { body: JSON.stringify(body) }),
    };
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    if (!response.ok) {
      let code = "SERVER_ERROR";
      let message = `HTTP ${response.status}`;
      try {
        const parsed = (await response.json()) as ApiErrorBody;
        code = parsed.error.code;
        message = parsed.error.message;
      } catch {
        // non-JSON error body; keep the generic code
      }
      if (response.status === 401) {
        throw new ApiError("AUTH_FAILED", message, 401);
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  whoami(): Promise<Account> {
    return this.call("GET", "/accounts/me");
  }

  async listBenchmarks(): Promise<BenchmarkSummary[]> {
    const body = await this.call<{ benchmarks: BenchmarkSummary[] }>("GET", "/benchmarks");
    return body.benchmarks;
  }

  async fetchQueue(state = "REQUESTED"): Promise<QueueItem[]> {
    const body = await this.call<{ associations: QueueItem[] }>(
      "GET",
      `/associations?state=${encodeURIComponent(state)}`,
    );
    return body.associations;
  }

  decideAssociation(associationId: string, decision: "approve" | "reject"): Promise<unknown> {
    return this.call("POST", `/associations/${associationId}/decision`, { decision });
  }

  getResults(benchmarkId: string): Promise<ResultsReport> {
    return this.call("GET", `/benchmarks/${benchmarkId}/results`);
  }
}
