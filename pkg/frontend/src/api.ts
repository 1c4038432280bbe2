/** Typed client over the documented GET endpoints. Base URL is configurable
 * (defaults to same-origin) so the explorer can point at any finished run. */

import type {
  ClustersPayload,
  GraphPayload,
  PointsPayload,
  SearchPayload,
  TrendsPayload,
} from "./types.js";
import { validateClusters, validateGraph, validatePoints } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = (body as { error?: string }).error ?? response.statusText;
      throw new ApiError(detail, response.status);
    }
    return body as T;
  }

  async points(domain: string): Promise<PointsPayload> {
    return validatePoints(
      await this.get(`/api/points?domain=${encodeURIComponent(domain)}`),
    );
  }

  async clusters(domain: string): Promise<ClustersPayload> {
    return validateClusters(
      await this.get(`/api/clusters?domain=${encodeURIComponent(domain)}`),
    );
  }

  async trends(domain: string): Promise<TrendsPayload> {
    return this.get(`/api/trends?domain=${encodeURIComponent(domain)}`);
  }

  async graph(): Promise<GraphPayload> {
    return validateGraph(await this.get("/api/graph"));
  }

  async search(query: string, k: number, domain: string): Promise<SearchPayload> {
    const q = encodeURIComponent(query);
    return this.get(
      `/api/search?q=${q}&k=${k}&domain=${encodeURIComponent(domain)}`,
    );
  }
}
