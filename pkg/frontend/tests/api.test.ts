import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Recorded {
  url: string;
  init?: RequestInit;
}

function stubClient(responder: (url: string, init?: RequestInit) => Response) {
  const calls: Recorded[] = [];
  const client = new ApiClient("http://host", async (url, init) => {
    calls.push({ url, init });
    return responder(url, init);
  });
  return { client, calls };
}

const json = (body: unknown, status = 200) =>
  new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });

describe("ApiClient", () => {
  it("builds /api/v1 urls", async () => {
    const { client, calls } = stubClient(() => json({ id: "x", N: 3 }));
    await client.createSession("/data/frames");
    expect(calls[0].url).toBe("http://host/api/v1/sessions");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      frames_dir: "/data/frames",
    });
  });

  it("PUTs annotation bytes as-is", async () => {
    const bytes = new Uint8Array([137, 80, 78, 71]).buffer;
    const { client, calls } = stubClient(() => new Response(null, { status: 204 }));
    await client.putAnnotation("s", 4, bytes);
    expect(calls[0].url).toBe("http://host/api/v1/sessions/s/annotations/4");
    expect(calls[0].init?.method).toBe("PUT");
    expect(calls[0].init?.body).toBe(bytes);
  });

  it("returns mask payloads as exact bytes", async () => {
    const payload = new Uint8Array([1, 2, 3, 4, 5]);
    const { client } = stubClient(() => new Response(payload, { status: 200 }));
    const got = new Uint8Array(await client.fetchMask("s", 0));
    expect(Array.from(got)).toEqual([1, 2, 3, 4, 5]);
  });

  it("surfaces the server's error detail verbatim", async () => {
    const { client } = stubClient(() =>
      json({ detail: "predictions are stale; run propagation first" }, 409),
    );
    await expect(client.suggest("s", 3)).rejects.toThrowError(
      /predictions are stale; run propagation first/,
    );
    try {
      await client.suggest("s", 3);
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
    }
  });

  it("encodes suggest parameters", async () => {
    const { client, calls } = stubClient(() =>
      json({ new_candidates: [], dissimilarity_scores: [], chosen_history: [], candidates: [] }),
    );
    await client.suggest("s", 5, 0.25, 12);
    expect(calls[0].url).toContain("/sessions/s/candidates?k=5&alpha=0.25&beta=12");
  });

  it("waitUntilFresh polls until fresh", async () => {
    let polls = 0;
    const { client } = stubClient(() => {
      polls += 1;
      return json({
        revision: 2,
        predictions_fresh: polls >= 3,
        busy: false,
      });
    });
    const status = await client.waitUntilFresh("s", 1);
    expect(status.predictions_fresh).toBe(true);
    expect(polls).toBe(3);
  });
});
