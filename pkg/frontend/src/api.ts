/** Typed client for the ztrisk HTTP API.
 *
 * Every probability shown in the UI comes through this module; nothing is
 * computed on the client. The transport is injectable so tests can intercept
 * and record exactly which numbers the service handed over.
 *
 * Concurrency: each endpoint is a channel with a monotonically increasing
 * request id. A response is delivered only if its id is still the newest one
 * issued on that channel when it arrives; superseded responses reject with
 * StaleResponse so callers can discard them. Because every evidence change
 * issues a fresh request, the newest delivered marginals always correspond
 * to the evidence most recently sent.
 */

import type {
  InferRequest,
  MarginalsDocument,
  ModelDocument,
  MpeDocument,
  ScenarioDocument,
  ScenarioRequest,
  TornadoDocument,
  TornadoRequest,
} from "./types.js";

export type Transport = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly field: string | null;

  constructor(status: number, code: string, message: string, field: string | null = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.field = field;
  }
}

export class ConnectionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConnectionError";
  }
}

export class StaleResponse extends Error {
  readonly channel: string;

  constructor(channel: string) {
    super(`superseded request on channel '${channel}'`);
    this.name = "StaleResponse";
    this.channel = channel;
  }
}

const defaultTransport: Transport = (url, init) => fetch(url, init);

function postInit(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class ApiClient {
  private readonly base: string;
  private readonly transport: Transport;
  private readonly newest = new Map<string, number>();

  constructor(base = "", transport: Transport = defaultTransport) {
    this.base = base.replace(/\/$/, "");
    this.transport = transport;
  }

  private issue(channel: string): number {
    const id = (this.newest.get(channel) ?? 0) + 1;
    this.newest.set(channel, id);
    return id;
  }

  private assertCurrent(channel: string, id: number): void {
    if (this.newest.get(channel) !== id) {
      throw new StaleResponse(channel);
    }
  }

  private async request<T>(channel: string, path: string, init?: RequestInit): Promise<T> {
    const id = this.issue(channel);
    let response: Response;
    try {
      response = await this.transport(this.base + path, init);
    } catch (err) {
      this.assertCurrent(channel, id);
      const detail = err instanceof Error ? err.message : String(err);
      throw new ConnectionError(`request to ${path} failed: ${detail}`);
    }
    this.assertCurrent(channel, id);
    if (!response.ok) {
      let code = "HttpError";
      let message = `${response.status} on ${path}`;
      let field: string | null = null;
      try {
        const body = (await response.json()) as Record<string, unknown>;
        if (typeof body.code === "string") code = body.code;
        if (typeof body.message === "string") message = body.message;
        if (typeof body.field === "string") field = body.field;
      } catch {
        // a non-JSON error body keeps the fallback description
      }
      this.assertCurrent(channel, id);
      throw new ApiError(response.status, code, message, field);
    }
    const document = (await response.json()) as T;
    this.assertCurrent(channel, id);
    return document;
  }

  getModel(): Promise<ModelDocument> {
    return this.request<ModelDocument>("model", "/model");
  }

  infer(body: InferRequest): Promise<MarginalsDocument> {
    return this.request<MarginalsDocument>("infer", "/infer", postInit(body));
  }

  scenario(body: ScenarioRequest): Promise<ScenarioDocument | MpeDocument> {
    return this.request<ScenarioDocument | MpeDocument>("scenario", "/scenario", postInit(body));
  }

  tornado(body: TornadoRequest): Promise<TornadoDocument> {
    return this.request<TornadoDocument>("tornado", "/tornado", postInit(body));
  }

  mpe(body: InferRequest): Promise<MpeDocument> {
    return this.request<MpeDocument>("mpe", "/mpe", postInit(body));
  }
}
