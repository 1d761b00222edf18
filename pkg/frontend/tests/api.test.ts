import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { fakeFetch, loadFixture } from "./helpers.js";

const fixture = loadFixture();

describe("ApiClient", () => {
  it("sends the bearer token and parses payloads", async () => {
    const { fetchFn, captured } = fakeFetch({
      "GET /api/v1/associations?state=REQUESTED": { payload: { associations: fixture.queue_payload } },
    });
    const api = new ApiClient("http://server", "tok-123", fetchFn);
    const queue = await api.fetchQueue();
    expect(queue).toEqual(fixture.queue_payload);
    expect(captured[0]?.authorization).toBe("Bearer tok-123");
  });

  it("maps the error envelope to ApiError with the server's code", async () => {
    const { fetchFn } = fakeFetch({
      "POST /api/v1/associations/a1/decision": {
        status: 409,
        payload: { error: { code: "ILLEGAL_TRANSITION", message: "already decided" } },
      },
    });
    const api = new ApiClient("http://server", "tok-123", fetchFn);
    await expect(api.decideAssociation("a1", "approve")).rejects.toMatchObject({
      code: "ILLEGAL_TRANSITION",
      status: 409,
    });
  });

  it("maps 401 to AUTH_FAILED so the app can route to login", async () => {
    const { fetchFn } = fakeFetch({
      "GET /api/v1/accounts/me": {
        status: 401,
        payload: { error: { code: "UNAUTHENTICATED", message: "unknown token" } },
      },
    });
    const api = new ApiClient("http://server", "expired", fetchFn);
    try {
      await api.whoami();
      expect.unreachable("should have thrown");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).code).toBe("AUTH_FAILED");
    }
  });
});
