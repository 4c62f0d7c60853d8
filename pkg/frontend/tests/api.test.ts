import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, createSession, getQueries, getResult, postAnswer } from "../src/api";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => vi.restoreAllMocks());

describe("api client", () => {
  it("creates a session with the exact payload", async () => {
    const fetchMock = vi
      .spyOn(globalThis, "fetch")
      .mockResolvedValue(jsonResponse({ id: "abc", kind: "cake", participants: [] }, 201));
    const snap = await createSession("cake", 3, { tolerance: 0.05 });
    expect(snap.id).toBe("abc");
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/api/v1/sessions");
    expect(JSON.parse(init!.body as string)).toEqual({ kind: "cake", players: 3, tolerance: 0.05 });
  });

  it("submits answers without rounding the labels", async () => {
    const fetchMock = vi
      .spyOn(globalThis, "fetch")
      .mockResolvedValue(jsonResponse({ query_id: "q", accepted: true, duplicate: false }));
    await postAnswer("s1", "0:2,1,1", [0, 2]);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/api/v1/sessions/s1/answers");
    expect(JSON.parse(init!.body as string)).toEqual({ query_id: "0:2,1,1", labels: [0, 2] });
  });

  it("fetches queries and results from the versioned paths", async () => {
    const fetchMock = vi
      .spyOn(globalThis, "fetch")
      .mockResolvedValueOnce(jsonResponse({ queries: [] }))
      .mockResolvedValueOnce(jsonResponse({ kind: "cake", x: [1], permutation: [0] }));
    await getQueries("s2");
    await getResult("s2");
    expect(fetchMock.mock.calls[0][0]).toBe("/api/v1/sessions/s2/queries");
    expect(fetchMock.mock.calls[1][0]).toBe("/api/v1/sessions/s2/result");
  });

  it("raises ApiError with the server detail on failure", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ detail: "hungry-player condition" }, 422),
    );
    await expect(postAnswer("s", "q", [1])).rejects.toMatchObject({
      status: 422,
      detail: "hungry-player condition",
    });
    try {
      await postAnswer("s", "q", [1]);
    } catch (e) {
      expect(e).toBeInstanceOf(ApiError);
    }
  });
});
