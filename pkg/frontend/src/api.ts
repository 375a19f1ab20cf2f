/**
 * REST client for the segmentation service.
 *
 * Thin typed wrapper over fetch; mask bytes are returned verbatim and
 * never transformed here.
 */

export type StrokeLabel = "fg" | "bg";

export interface StrokePayload {
  points: [number, number][];
  label: StrokeLabel;
  radius?: number;
}

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
}

export interface SegmentStats {
  n_train: number;
  iterations: number;
  converged: boolean;
  fit_ms: number;
}

export interface SegmentResult {
  version: number;
  stats: SegmentStats;
}

export interface SegmentParams {
  budget?: number;
  kernel_width?: number;
  alpha?: number;
  beta?: number;
  max_iter?: number;
  seed?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = typeof fetch;

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, detail);
}

export class SegmentationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  async createSession(image: Blob, filename = "upload.png"): Promise<SessionInfo> {
    const form = new FormData();
    form.append("image", image, filename);
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as SessionInfo;
  }

  async addStrokes(
    sessionId: string,
    strokes: StrokePayload[],
  ): Promise<{ version: number; stroke_count: number }> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/scribbles`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ strokes }),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as { version: number; stroke_count: number };
  }

  async clearStrokes(sessionId: string): Promise<{ version: number }> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/scribbles`, {
      method: "DELETE",
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as { version: number };
  }

  async segment(sessionId: string, params?: SegmentParams): Promise<SegmentResult> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/segment`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(params ? { params } : {}),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as SegmentResult;
  }

  /** Mask PNG bytes, byte-for-byte as the server sent them. */
  async fetchMask(sessionId: string): Promise<Uint8Array> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/mask`);
    if (!resp.ok) await parseError(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }

  async getSession(sessionId: string): Promise<Record<string, unknown>> {
    const resp = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}`);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as Record<string, unknown>;
  }
}
