/** HTTP client for the synthesis service. The UI talks to the backend only
 * through these three endpoints: /api/health, /api/synthesize, /api/transform. */

import type {
  Candidate,
  SynthesisRequest,
  SynthesisResponse,
  TransformResponse,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  field?: string;
  opIndex?: number;

  constructor(status: number, message: string, field?: string, opIndex?: number) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.field = field;
    this.opIndex = opIndex;
  }
}

export interface SynthesizeOptions {
  /** Stream candidates as they are found instead of waiting for the full set. */
  stream?: boolean;
  onCandidate?: (candidate: Candidate) => void;
  signal?: AbortSignal;
}

export interface HealthResponse {
  status: string;
  version: string;
}

type FetchLike = typeof fetch;

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) {
    return;
  }
  let message = `HTTP ${resp.status}`;
  let field: string | undefined;
  let opIndex: number | undefined;
  try {
    const body = (await resp.json()) as Record<string, unknown>;
    if (typeof body.error === "string") {
      message = body.error;
    }
    if (typeof body.field === "string") {
      field = body.field;
    }
    if (typeof body.op_index === "number") {
      opIndex = body.op_index;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(resp.status, message, field, opIndex);
}

/** Yield one parsed JSON object per NDJSON line from a response body. */
async function* ndjsonEvents(resp: Response): AsyncGenerator<Record<string, unknown>> {
  if (resp.body === null) {
    throw new ApiError(resp.status, "response has no body");
  }
  const reader = resp.body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
    const { done, value } = await reader.read();
    if (done) {
      break;
    }
    buffer += decoder.decode(value, { stream: true });
    let newline = buffer.indexOf("\n");
    while (newline >= 0) {
      const line = buffer.slice(0, newline).trim();
      buffer = buffer.slice(newline + 1);
      if (line.length > 0) {
        yield JSON.parse(line) as Record<string, unknown>;
      }
      newline = buffer.indexOf("\n");
    }
  }
  const tail = (buffer + decoder.decode()).trim();
  if (tail.length > 0) {
    yield JSON.parse(tail) as Record<string, unknown>;
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? globalThis.fetch.bind(globalThis);
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/health`);
    await raiseForStatus(resp);
    return (await resp.json()) as HealthResponse;
  }

  async synthesize(
    request: SynthesisRequest,
    options: SynthesizeOptions = {},
  ): Promise<SynthesisResponse> {
    const stream = options.stream === true;
    const resp = await this.fetchImpl(`${this.baseUrl}/api/synthesize`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(stream ? { ...request, stream: true } : request),
      signal: options.signal,
    });
    await raiseForStatus(resp);
    if (!stream) {
      return (await resp.json()) as SynthesisResponse;
    }
    for await (const event of ndjsonEvents(resp)) {
      if (event.type === "candidate") {
        options.onCandidate?.(event.candidate as unknown as Candidate);
      } else if (event.type === "done") {
        return {
          candidates: event.candidates as Candidate[],
          stats: event.stats as SynthesisResponse["stats"],
          truncated: event.truncated as boolean,
          reason: event.reason as string | null,
        };
      } else if (event.type === "error") {
        throw new ApiError((event.status as number) ?? 422, event.error as string);
      }
    }
    throw new ApiError(resp.status, "stream ended without a done event");
  }

  async transform(
    table: SynthesisRequest["table"],
    program: string,
  ): Promise<TransformResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/transform`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ table, program }),
    });
    await raiseForStatus(resp);
    return (await resp.json()) as TransformResponse;
  }
}
