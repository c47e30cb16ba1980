import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, UnreachableError } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("fetches the next task with annotator and kind params", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ task_id: "t1", kind: "hope_label", batch: "b", payload: {}, assigned_annotators: [], status: "open" }),
    );
    const client = new ApiClient("http://svc", fetchMock as unknown as typeof fetch);
    const Task = await client.nextTask("anno1", "hope_label");
    expect(Task?.task_id).toBe("t1");
    const url = fetchMock.mock.calls[0][0] as string;
    expect(url).toBe("http://svc/api/tasks/next?annotator=anno1&kind=hope_label");
  });

  it("maps 204 to an empty queue", async () => {
    const fetchMock = vi.fn(async () => new Response(null, { status: 204 }));
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    expect(await client.nextTask("anno1")).toBeNull();
  });

  it("posts label submissions as JSON", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ ok: true }));
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    await client.submitLabel("t9", { annotator: "a1", label: "hope", criteria: ["P8"] });
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("/api/tasks/t9/label");
    expect(init.method).toBe("POST");
    expect(JSON.parse(String(init.body))).toEqual({
      annotator: "a1",
      label: "hope",
      criteria: ["P8"],
    });
  });

  it("surfaces service errors with status and message", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ error: "already labeled by a1" }, 409));
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    const err = await client
      .submitLabel("t9", { annotator: "a1", label: "hope", criteria: [] })
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toContain("already labeled");
  });

  it("wraps network failures as UnreachableError (retry state, not data loss)", async () => {
    const fetchMock = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    const err = await client.nextTask("a1").catch((e) => e);
    expect(err).toBeInstanceOf(UnreachableError);
  });

  it("retrying the same submission after a failure posts identical payloads", async () => {
    let calls = 0;
    const fetchMock = vi.fn(async (_url: string, init?: RequestInit) => {
      calls += 1;
      if (calls === 1) throw new TypeError("fetch failed");
      expect(JSON.parse(String(init?.body))).toEqual({
        annotator: "a1",
        label: "not_hope",
        criteria: ["N3"],
      });
      return jsonResponse({ ok: true });
    });
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    const submission = { annotator: "a1", label: "not_hope", criteria: ["N3"] };
    await expect(client.submitLabel("t1", submission)).rejects.toBeInstanceOf(UnreachableError);
    await client.submitLabel("t1", submission); // unchanged payload, second attempt
    expect(calls).toBe(2);
  });

  it("fetches agreement reports and guideline criteria", async () => {
    const fetchMock = vi.fn(async (url: string) => {
      if (url.includes("/api/agreement")) {
        return jsonResponse({ batch: "r1", n: 10, p_o: 0.8, kappa: 0.6, disagreements: ["t8"] });
      }
      return jsonResponse({ task: "x", summary: "s", positive: [], negative: [] });
    });
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    const report = await client.agreement("r1");
    expect(report.kappa).toBeCloseTo(0.6);
    expect(report.disagreements).toEqual(["t8"]);
    const guide = await client.guideline();
    expect(guide.positive).toEqual([]);
  });

  it("resolves consensus labels", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ ok: true, consensus: "hope" }));
    const client = new ApiClient("", fetchMock as unknown as typeof fetch);
    const out = await client.resolve("t8", "hope");
    expect(out.consensus).toBe("hope");
    const [url] = fetchMock.mock.calls[0] as [string];
    expect(url).toBe("/api/tasks/t8/resolve");
  });
});
