// Wire types for the search service JSON responses.

export type Provenance = "match" | "recommendation" | "both";

export interface VideoCard {
  id: number;
  title: string;
  available: boolean;
  score: number;
  provenance: Provenance;
}

export interface GroupEvidence {
  definition: string;
  anchor: number | null;
}

export interface ResultGroup {
  header: string;
  evidence: GroupEvidence;
  videos: VideoCard[];
}

export interface FacetDiagnostics {
  distribution: Record<string, number>;
  specificity: number;
  fetch_probability: number;
}

export interface SearchResponse {
  query: string;
  facets: FacetDiagnostics;
  groups: ResultGroup[];
  pills: string[];
  timing_ms: number;
  snapshot: number;
}

export interface HealthResponse {
  snapshot: number;
  entities: number;
  videos: number;
  talents: number;
  collections: number;
  uptime_s: number;
}
