// Thin client for the session service. The fetch function is injectable so
// tests can run without a server.

import type { CreateRequest, Snapshot, Transcript } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class WrongPhaseError extends ApiError {
  constructor(message: string) {
    super(409, message);
  }
}

export class UnknownSessionError extends ApiError {
  constructor(message: string) {
    super(404, message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // keep the status text
  }
  if (response.status === 409) throw new WrongPhaseError(detail);
  if (response.status === 404) throw new UnknownSessionError(detail);
  throw new ApiError(response.status, detail);
}

export class SessionApi {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  create(req: CreateRequest): Promise<Snapshot> {
    return this.request<Snapshot>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  snapshot(id: string): Promise<Snapshot> {
    return this.request<Snapshot>(`/sessions/${id}`);
  }

  answer(id: string, positive: boolean): Promise<Snapshot> {
    return this.request<Snapshot>(`/sessions/${id}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ classification: positive ? "yes" : "no" }),
    });
  }

  transcript(id: string): Promise<Transcript> {
    return this.request<Transcript>(`/sessions/${id}/transcript`);
  }

  async abort(id: string): Promise<void> {
    const response = await this.fetchFn(`${this.base}/sessions/${id}`, {
      method: "DELETE",
    });
    if (!response.ok) await fail(response);
  }
}
