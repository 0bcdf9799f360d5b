import { describe, expect, it, vi } from "vitest";

import { ApiError, SessionApi, UnknownSessionError, WrongPhaseError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("SessionApi", () => {
  it("creates sessions and parses snapshots", async () => {
    const fetchFn = vi.fn().mockResolvedValue(
      jsonResponse(200, { id: "s1", phase: "awaiting_answer" }),
    );
    const api = new SessionApi("http://x", fetchFn);
    const snap = await api.create({ benchmark: "purdey", oracle: "human" });
    expect(snap.id).toBe("s1");
    const [url, init] = fetchFn.mock.calls[0];
    expect(url).toBe("http://x/sessions");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body).benchmark).toBe("purdey");
  });

  it("sends yes/no classifications verbatim", async () => {
    const fetchFn = vi.fn().mockImplementation(() =>
      Promise.resolve(jsonResponse(200, { phase: "generating" })),
    );
    const api = new SessionApi("", fetchFn);
    await api.answer("s1", true);
    await api.answer("s1", false);
    expect(JSON.parse(fetchFn.mock.calls[0][1].body)).toEqual({ classification: "yes" });
    expect(JSON.parse(fetchFn.mock.calls[1][1].body)).toEqual({ classification: "no" });
    expect(fetchFn.mock.calls[0][0]).toBe("/sessions/s1/answer");
  });

  it("raises WrongPhaseError on 409 with the server detail", async () => {
    const fetchFn = vi.fn().mockImplementation(() =>
      Promise.resolve(jsonResponse(409, { detail: "no pending query (phase generating)" })),
    );
    const api = new SessionApi("", fetchFn);
    await expect(api.answer("s1", true)).rejects.toThrowError(WrongPhaseError);
    await expect(api.answer("s1", true)).rejects.toThrow(/no pending query/);
  });

  it("raises UnknownSessionError on 404", async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(404, { detail: "unknown session" }));
    const api = new SessionApi("", fetchFn);
    await expect(api.snapshot("zzz")).rejects.toThrowError(UnknownSessionError);
  });

  it("wraps other failures in ApiError", async () => {
    const fetchFn = vi.fn().mockResolvedValue(new Response("boom", { status: 500 }));
    const api = new SessionApi("", fetchFn);
    await expect(api.snapshot("s1")).rejects.toThrowError(ApiError);
  });

  it("aborts via DELETE", async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(200, { status: "aborted" }));
    const api = new SessionApi("", fetchFn);
    await api.abort("s1");
    expect(fetchFn.mock.calls[0][0]).toBe("/sessions/s1");
    expect(fetchFn.mock.calls[0][1].method).toBe("DELETE");
  });
});
