import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { QUEUE_POLL_INTERVAL_MS, startPolling } from "../src/poll.js";
import { ApprovalQueue } from "../src/queue.js";
import { renderQueue } from "../src/render.js";
import { fakeFetch, loadFixture } from "./helpers.js";

const fixture = loadFixture();
const ASSOC = fixture.queue_association_id;

function makeQueue(routes: Parameters<typeof fakeFetch>[0]) {
  const { fetchFn, captured } = fakeFetch(routes);
  const api = new ApiClient("http://server", "tok", fetchFn);
  const states: ReturnType<ApprovalQueue["snapshot"]>[] = [];
  const queue = new ApprovalQueue(api, (state) => states.push(state));
  return { queue, captured, states };
}

describe("ApprovalQueue", () => {
  it("loads the recorded queue and renders verbatim hashes", async () => {
    const { queue, states } = makeQueue({
      "GET /api/v1/associations?state=REQUESTED": {
        payload: { associations: fixture.queue_payload },
      },
    });
    await queue.refresh();
    const state = states.at(-1)!;
    expect(state.items.map((i) => i.id)).toContain(ASSOC);
    const html = renderQueue(state);
    const item = fixture.queue_payload.find((i) => i.id === ASSOC)!;
    for (const hash of Object.values(item.pinned_hashes)) {
      if (hash) {
        expect(html).toContain(`data-copy="${hash}"`); // full digest, no truncation
      }
    }
  });

  it("approves optimistically: the item leaves the queue before the reply", async () => {
    let resolveDecision: (() => void) | undefined;
    const gate = new Promise<void>((resolve) => {
      resolveDecision = resolve;
    });
    const { fetchFn } = fakeFetch({
      "GET /api/v1/associations?state=REQUESTED": {
        payload: { associations: fixture.queue_payload },
      },
    });
    const api = new ApiClient("http://server", "tok", async (input, init) => {
      if ((init?.method ?? "GET") === "POST") {
        await gate;
        return new Response(JSON.stringify({ id: ASSOC, state: "APPROVED" }), { status: 200 });
      }
      return fetchFn(input, init);
    });
    const states: ReturnType<ApprovalQueue["snapshot"]>[] = [];
    const queue = new ApprovalQueue(api, (state) => states.push(state));
    await queue.refresh();
    const pending = queue.decide(ASSOC, "approve");
    expect(states.at(-1)!.items.find((i) => i.id === ASSOC)).toBeUndefined();
    expect(states.at(-1)!.inFlight.has(ASSOC)).toBe(true);
    resolveDecision!();
    expect(await pending).toBe(true);
    expect(states.at(-1)!.inFlight.size).toBe(0);
  });

  it("rolls back and surfaces the server error inline on rejection", async () => {
    const { queue, states } = makeQueue({
      "GET /api/v1/associations?state=REQUESTED": {
        payload: { associations: fixture.queue_payload },
      },
      [`POST /api/v1/associations/${ASSOC}/decision`]: {
        status: 409,
        payload: { error: { code: "ILLEGAL_TRANSITION", message: "decision raced by CLI" } },
      },
    });
    await queue.refresh();
    expect(await queue.decide(ASSOC, "approve")).toBe(false);
    const state = states.at(-1)!;
    expect(state.items.map((i) => i.id)).toContain(ASSOC); // rolled back
    expect(state.errors.get(ASSOC)).toContain("ILLEGAL_TRANSITION");
    expect(renderQueue(state)).toContain("decision failed");
  });

  it("renders the empty state when nothing is pending", () => {
    const html = renderQueue({
      items: [],
      inFlight: new Set(),
      errors: new Map(),
      lastRefreshed: null,
    });
    expect(html).toContain("empty-state");
  });

  it("a REQUESTED association appears within one 10s poll", async () => {
    vi.useFakeTimers();
    try {
      const { queue, states } = makeQueue({
        "GET /api/v1/associations?state=REQUESTED": [
          { payload: { associations: [] } }, // first poll: nothing yet
          { payload: { associations: fixture.queue_payload } }, // it arrives
        ],
      });
      const handle = startPolling(() => queue.refresh(), QUEUE_POLL_INTERVAL_MS);
      await vi.advanceTimersByTimeAsync(0);
      expect(states.at(-1)!.items).toHaveLength(0);
      await vi.advanceTimersByTimeAsync(QUEUE_POLL_INTERVAL_MS); // exactly one interval
      expect(states.at(-1)!.items.map((i) => i.id)).toContain(ASSOC);
      handle.stop();
    } finally {
      vi.useRealTimers();
    }
  });
});
