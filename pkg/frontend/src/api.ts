/** Typed client for the mediator API, with a sequence guard so a slow
 * response never overwrites a newer one (at most one query in flight
 * matters per tab; stale results are dropped, not aborted). */

import type { ApiError, OntologyInfo, QueryResponse, SourceInfo } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class MediatorError extends Error {
  constructor(message: string, public readonly stage: string,
              public readonly status: number) {
    super(message);
  }
}

export interface QueryRequest {
  query?: string;
  keyword?: string;
  sources?: string[];
  explain?: boolean;
}

export class ApiClient {
  private seq = 0;

  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init)
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.base + path);
    } catch (exc) {
      throw new MediatorError(`cannot reach the mediator: ${exc}`, "transport", 0);
    }
    if (!resp.ok) {
      throw await this.asError(resp);
    }
    return (await resp.json()) as T;
  }

  private async asError(resp: Response): Promise<MediatorError> {
    try {
      const body = (await resp.json()) as ApiError;
      return new MediatorError(body.error, body.stage, resp.status);
    } catch {
      return new MediatorError(`HTTP ${resp.status}`, "http", resp.status);
    }
  }

  ontology(): Promise<OntologyInfo> {
    return this.getJson<OntologyInfo>("/api/ontology");
  }

  async sources(): Promise<SourceInfo[]> {
    const data = await this.getJson<{ sources: SourceInfo[] }>("/api/sources");
    return data.sources;
  }

  async health(): Promise<boolean> {
    try {
      await this.getJson<{ status: string }>("/api/health");
      return true;
    } catch {
      return false;
    }
  }

  /** Resolves with the response, or null when a newer query() call was
   * issued while this one was in flight. */
  async query(request: QueryRequest): Promise<QueryResponse | null> {
    const mine = ++this.seq;
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.base + "/api/query", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ explain: true, ...request }),
      });
    } catch (exc) {
      if (mine !== this.seq) return null;
      throw new MediatorError(`cannot reach the mediator: ${exc}`, "transport", 0);
    }
    if (mine !== this.seq) return null;
    if (!resp.ok) {
      throw await this.asError(resp);
    }
    return (await resp.json()) as QueryResponse;
  }
}
