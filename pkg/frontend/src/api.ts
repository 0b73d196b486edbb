import type { HealthResponse, SearchResponse } from "./types.js";

export async function fetchSearch(
  baseUrl: string,
  query: string,
  k = 40,
  signal?: AbortSignal,
): Promise<SearchResponse> {
  const url = new URL("/search", baseUrl);
  url.searchParams.set("q", query);
  url.searchParams.set("k", String(k));
  const response = await fetch(url, { signal });
  if (!response.ok) {
    throw new Error(`search failed: HTTP ${response.status}`);
  }
  return (await response.json()) as SearchResponse;
}

export async function fetchHealth(baseUrl: string): Promise<HealthResponse> {
  const response = await fetch(new URL("/health", baseUrl));
  if (!response.ok) {
    throw new Error(`health failed: HTTP ${response.status}`);
  }
  return (await response.json()) as HealthResponse;
}
