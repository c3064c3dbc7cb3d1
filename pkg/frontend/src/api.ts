/**
 * Typed client for the /api/v1 session API. All UI traffic flows through
 * here; mask and frame payloads are returned as the exact bytes the server
 * sent so views can render (and tests can compare) without re-encoding.
 */

export interface SessionSummary {
  id: string;
  frames_dir: string;
  num_frames: number;
  num_objects: number | null;
  frame_height: number;
  frame_width: number;
  revision: number;
  annotations_revision: number;
  predictions_revision: number;
  predictions_fresh: boolean;
  annotated_frames: number[];
  last_suggestions: { frame: number; score: number }[];
  config: unknown;
}

export interface CandidateResponse {
  new_candidates: number[];
  dissimilarity_scores: number[];
  chosen_history: number[];
  candidates: { frame: number; score: number }[];
}

export interface StatusResponse {
  revision: number;
  predictions_fresh: boolean;
  busy: boolean;
}

export interface MetricsResponse {
  per_frame: { frame: number; object: number; J: number; F: number }[];
  mean_J: number;
  mean_F: number;
  J_and_F: number;
  convention: string;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (...a) => fetch(...a)) {
    this.base = baseUrl.replace(/\/$/, "") + "/api/v1";
    this.fetchImpl = fetchImpl;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async createSession(framesDir: string, config?: unknown): Promise<{ id: string; N: number }> {
    const body: Record<string, unknown> = { frames_dir: framesDir };
    if (config !== undefined) body.config = config;
    const response = await this.request("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return response.json();
  }

  async getSummary(id: string): Promise<SessionSummary> {
    return (await this.request(`/sessions/${id}`)).json();
  }

  async getStatus(id: string): Promise<StatusResponse> {
    return (await this.request(`/sessions/${id}/status`)).json();
  }

  frameUrl(id: string, index: number): string {
    return `${this.base}/sessions/${id}/frames/${index}`;
  }

  async fetchFrame(id: string, index: number): Promise<ArrayBuffer> {
    return (await this.request(`/sessions/${id}/frames/${index}`)).arrayBuffer();
  }

  /** Predicted (or annotated) mask PNG, exact bytes as served. */
  async fetchMask(id: string, index: number): Promise<ArrayBuffer> {
    return (await this.request(`/sessions/${id}/masks/${index}`)).arrayBuffer();
  }

  async putAnnotation(id: string, index: number, png: ArrayBuffer | Blob): Promise<void> {
    await this.request(`/sessions/${id}/annotations/${index}`, {
      method: "PUT",
      headers: { "content-type": "image/png" },
      body: png,
    });
  }

  async deleteAnnotation(id: string, index: number): Promise<void> {
    await this.request(`/sessions/${id}/annotations/${index}`, { method: "DELETE" });
  }

  async propagate(id: string): Promise<{ revision: number }> {
    return (await this.request(`/sessions/${id}/propagate`, { method: "POST" })).json();
  }

  async suggest(id: string, k: number, alpha?: number, beta?: number): Promise<CandidateResponse> {
    const params = new URLSearchParams({ k: String(k) });
    if (alpha !== undefined) params.set("alpha", String(alpha));
    if (beta !== undefined) params.set("beta", String(beta));
    return (await this.request(`/sessions/${id}/candidates?${params}`)).json();
  }

  async metrics(id: string, gtDir: string, excludeAnnotated = true): Promise<MetricsResponse> {
    const params = new URLSearchParams({
      gt: gtDir,
      exclude_annotated: String(excludeAnnotated),
    });
    return (await this.request(`/sessions/${id}/metrics?${params}`)).json();
  }

  /** Poll the status endpoint until predictions are fresh (or attempts run out). */
  async waitUntilFresh(id: string, intervalMs = 250, maxAttempts = 240): Promise<StatusResponse> {
    for (let attempt = 0; attempt < maxAttempts; attempt++) {
      const status = await this.getStatus(id);
      if (status.predictions_fresh && !status.busy) return status;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
    throw new ApiError(408, "timed out waiting for propagation to finish");
  }
}
