/** Typed client for the what-if service. All data enters the app through here,
 * so tests can intercept the transport and account for every number shown. */

import type { EditRequest, NetworkDocument, SessionCreated, Snapshot } from "./types.js";

export interface TransportResponse {
  status: number;
  body: unknown;
}

export interface Transport {
  request(method: string, path: string, body?: unknown): Promise<TransportResponse>;
}

export class HttpTransport implements Transport {
  constructor(private readonly baseUrl: string = "") {}

  async request(method: string, path: string, body?: unknown): Promise<TransportResponse> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return { status: response.status, body: await response.json() };
  }
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function errorFrom(response: TransportResponse): ApiError {
  const body = response.body as { code?: string; message?: string };
  return new ApiError(response.status, body.code ?? "error", body.message ?? "request failed");
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  async createSession(
    network: NetworkDocument,
    referenceArc?: [number, number],
    augment = false,
  ): Promise<SessionCreated> {
    const payload: Record<string, unknown> = { network };
    if (referenceArc) payload.referenceArc = referenceArc;
    const path = `/api/v1/sessions?augment=${augment}`;
    const response = await this.transport.request("POST", path, payload);
    if (response.status !== 201) throw errorFrom(response);
    return response.body as SessionCreated;
  }

  async applyEdit(sessionId: string, edit: EditRequest): Promise<Snapshot> {
    const response = await this.transport.request(
      "POST",
      `/api/v1/sessions/${sessionId}/edits`,
      edit,
    );
    if (response.status !== 200) throw errorFrom(response);
    return response.body as Snapshot;
  }

  async undo(sessionId: string): Promise<Snapshot> {
    const response = await this.transport.request("POST", `/api/v1/sessions/${sessionId}/undo`);
    if (response.status !== 200) throw errorFrom(response);
    return response.body as Snapshot;
  }

  async health(): Promise<{ status: string; version: string }> {
    const response = await this.transport.request("GET", "/health");
    if (response.status !== 200) throw errorFrom(response);
    return response.body as { status: string; version: string };
  }
}
