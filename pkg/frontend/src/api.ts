// Typed client for the retrieval service. Thin by design: one method per
// endpoint, JSON in, JSON out, structured errors surfaced as ApiError.

import type {
  CorporaDoc,
  ErrorDoc,
  HealthDoc,
  MatchDoc,
  MatchRequest,
  NodeDoc,
  RecountDoc,
  RecountRequest,
  RetrieveDoc,
  RetrieveRequest,
  StatsDoc,
  TreeDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: Record<string, unknown>;

  constructor(status: number, doc: ErrorDoc) {
    super(doc.message);
    this.code = doc.code;
    this.status = status;
    this.detail = doc.detail ?? {};
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind so a bare window.fetch keeps its receiver
    const impl = fetchImpl ?? globalThis.fetch;
    if (!impl) throw new Error("no fetch implementation available");
    this.fetchImpl = (input, init) => impl.call(globalThis, input, init);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body as ErrorDoc);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<HealthDoc> {
    return this.request<HealthDoc>("/health");
  }

  stats(): Promise<StatsDoc> {
    return this.request<StatsDoc>("/ontology/stats");
  }

  tree(root?: string, depth = 1): Promise<TreeDoc> {
    const params = new URLSearchParams({ depth: String(depth) });
    if (root !== undefined) params.set("root", root);
    return this.request<TreeDoc>(`/ontology/tree?${params}`);
  }

  node(id: string): Promise<NodeDoc> {
    return this.request<NodeDoc>(`/ontology/node/${encodeURIComponent(id)}`);
  }

  corpora(): Promise<CorporaDoc> {
    return this.request<CorporaDoc>("/corpora");
  }

  match(request: MatchRequest): Promise<MatchDoc> {
    return this.post<MatchDoc>("/match", request);
  }

  retrieve(request: RetrieveRequest): Promise<RetrieveDoc> {
    return this.post<RetrieveDoc>("/retrieve", request);
  }

  recount(request: RecountRequest): Promise<RecountDoc> {
    return this.post<RecountDoc>("/recount", request);
  }
}
