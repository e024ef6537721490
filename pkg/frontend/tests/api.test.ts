import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api.js";
import { DEFAULT_CONFIG } from "../src/state.js";
import { ServiceError } from "../src/types.js";

function mockFetch(status: number, body: unknown) {
  return vi.fn(async () => ({
    status,
    json: async () => body,
  })) as unknown as typeof fetch;
}

afterEach(() => vi.unstubAllGlobals());

describe("ApiClient", () => {
  it("returns the prediction and marks in-range responses", async () => {
    const payload = {
      eui: 47.2,
      annual_energy: 142000,
      activations: [],
      model_version: "abc",
      warnings: [],
    };
    vi.stubGlobal("fetch", mockFetch(200, payload));
    const client = new ApiClient("http://svc");
    const out = await client.predict(DEFAULT_CONFIG, { kind: "box" });
    expect(out.outOfRange).toBe(false);
    expect(out.response.eui).toBe(47.2);
  });

  it("treats 422 as a valid prediction flagged out of range", async () => {
    const payload = {
      eui: 51.0,
      annual_energy: 150000,
      activations: [],
      model_version: "abc",
      warnings: [{ field: "u_wall", message: "u_wall = 0.9 outside [0.15, 0.25]" }],
    };
    vi.stubGlobal("fetch", mockFetch(422, payload));
    const client = new ApiClient();
    const out = await client.predict(DEFAULT_CONFIG, null);
    expect(out.outOfRange).toBe(true);
    expect(out.response.warnings[0].field).toBe("u_wall");
  });

  it("raises ServiceError with field details on 400", async () => {
    vi.stubGlobal(
      "fetch",
      mockFetch(400, {
        error: "schema",
        details: [{ field: "config.u_wall", message: "Field required" }],
      }),
    );
    const client = new ApiClient();
    await expect(client.predict(DEFAULT_CONFIG, null)).rejects.toThrowError(
      ServiceError,
    );
    try {
      await client.predict(DEFAULT_CONFIG, null);
    } catch (err) {
      expect((err as ServiceError).details[0].field).toBe("config.u_wall");
      expect((err as ServiceError).status).toBe(400);
    }
  });

  it("sends the abort signal through to fetch", async () => {
    const spy = vi.fn(async (_url: unknown, init?: RequestInit) => {
      expect(init?.signal).toBeInstanceOf(AbortSignal);
      return { status: 200, json: async () => ({}) };
    });
    vi.stubGlobal("fetch", spy as unknown as typeof fetch);
    const client = new ApiClient();
    const controller = new AbortController();
    await client.predict(DEFAULT_CONFIG, null, controller.signal);
    expect(spy).toHaveBeenCalledOnce();
  });
});
