/** Dashboard wiring: login, queue polling, leaderboard fetches.
 *
 * The only state beyond the session token is the queue/leaderboard caches;
 * every rendered fact comes from one API response.
 */

import { ApiClient, ApiError } from "./api.js";
import { buildLeaderboard } from "./leaderboard.js";
import { QUEUE_POLL_INTERVAL_MS, startPolling, type PollHandle } from "./poll.js";
import { ApprovalQueue } from "./queue.js";
import {
  renderBenchmarkOptions,
  renderIdentity,
  renderLeaderboard,
  renderQueue,
} from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

let api: ApiClient | null = null; // token held in memory only
let queue: ApprovalQueue | null = null;
let poller: PollHandle | null = null;

async function login(): Promise<void> {
  const token = (el<HTMLInputElement>("token-input").value ?? "").trim();
  if (!token) {
    el("login-error").textContent = "enter an access token";
    return;
  }
  const candidate = new ApiClient(window.location.origin, token);
  try {
    const me = await candidate.whoami();
    api = candidate;
    el("identity").innerHTML = renderIdentity(me.display_name, me.roles);
    el("login-view").hidden = true;
    el("app-view").hidden = false;
    el<HTMLInputElement>("token-input").value = "";
    startQueue();
    void loadBenchmarks();
  } catch (error) {
    el("login-error").textContent =
      error instanceof ApiError ? `login failed: ${error.message}` : String(error);
  }
}

function startQueue(): void {
  if (!api) {
    return;
  }
  queue = new ApprovalQueue(api, (state) => {
    el("queue").innerHTML = renderQueue(state);
  });
  poller?.stop();
  poller = startPolling(
    () => queue!.refresh(),
    QUEUE_POLL_INTERVAL_MS,
    (error) => {
      if (error instanceof ApiError && error.code === "AUTH_FAILED") {
        logout();
      }
    },
  );
}

function logout(): void {
  poller?.stop();
  poller = null;
  api = null;
  queue = null;
  el("app-view").hidden = true;
  el("login-view").hidden = false;
}

async function loadBenchmarks(): Promise<void> {
  if (!api) {
    return;
  }
  const benchmarks = await api.listBenchmarks();
  const select = el<HTMLSelectElement>("benchmark-select");
  select.innerHTML = renderBenchmarkOptions(benchmarks, select.value);
  if (benchmarks.length > 0) {
    await showLeaderboard(select.value || benchmarks[0]!.id);
  }
}

async function showLeaderboard(benchmarkId: string): Promise<void> {
  if (!api || !benchmarkId) {
    return;
  }
  try {
    const report = await api.getResults(benchmarkId);
    el("leaderboard").innerHTML = renderLeaderboard(buildLeaderboard(report));
  } catch (error) {
    el("leaderboard").innerHTML =
      `<p class="error">${error instanceof ApiError ? error.message : String(error)}</p>`;
  }
}

function wire(): void {
  el("login-button").addEventListener("click", () => void login());
  el<HTMLInputElement>("token-input").addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") {
      void login();
    }
  });
  el("logout-button").addEventListener("click", logout);
  el("benchmark-select").addEventListener("change", (event) => {
    void showLeaderboard((event.target as HTMLSelectElement).value);
  });
  el("refresh-leaderboard").addEventListener("click", () => {
    void showLeaderboard(el<HTMLSelectElement>("benchmark-select").value);
  });
  // one delegated handler: queue decisions and verbatim-hash copying
  el("queue").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const decision = target.dataset["decide"] as "approve" | "reject" | undefined;
    if (decision && target.dataset["id"] && queue) {
      void queue.decide(target.dataset["id"], decision);
    }
    const copyValue = target.dataset["copy"];
    if (copyValue) {
      void navigator.clipboard.writeText(copyValue);
    }
  });
}

wire();
