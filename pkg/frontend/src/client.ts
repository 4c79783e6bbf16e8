// Typed access to the tracing service. Every request and response passes
// through a log so tests can trace what the UI displayed back to the wire.

import type { Assessment, ClusterDetail, Notification, RegionInfo } from "./types.js";

export interface RequestLogEntry {
  method: string;
  url: string;
  status: number;
  body: unknown;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  readonly log: RequestLogEntry[] = [];

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string): Promise<T> {
    const url = `${this.baseUrl}${path}`;
    const response = await this.fetchImpl(url, { method });
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    this.log.push({ method, url, status: response.status, body });
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in (body as object)
          ? String((body as { detail: unknown }).detail)
          : `HTTP ${response.status}`;
      throw new ServiceError(response.status, detail);
    }
    return body as T;
  }

  regions(): Promise<RegionInfo[]> {
    return this.request("GET", "/api/regions");
  }

  assessment(regionId: string, force = false): Promise<Assessment> {
    const suffix = force ? "?force=true" : "";
    return this.request("GET", `/api/regions/${regionId}/assessment${suffix}`);
  }

  clusters(regionId: string): Promise<ClusterDetail> {
    return this.request("GET", `/api/regions/${regionId}/clusters`);
  }

  notifications(userId: string, after?: number): Promise<Notification[]> {
    const suffix = after === undefined ? "" : `?after=${after}`;
    return this.request("GET", `/api/users/${userId}/notifications${suffix}`);
  }
}
