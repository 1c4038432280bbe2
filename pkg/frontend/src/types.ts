/** Payload shapes delivered by the read-only run API. The UI renders these
 * values verbatim; it never recomputes scores, slopes, or similarities. */

export interface PaperPoint {
  paper_id: string;
  x: number;
  y: number;
  cluster: number;
}

export interface PointsPayload {
  domain: string;
  points: PaperPoint[];
}

export interface ClusterEntry {
  cluster_index: number;
  keywords: string[];
  size: number;
}

export interface ClustersPayload {
  domain: string;
  clusters: ClusterEntry[];
}

export interface TrendPanelData {
  cluster_index: number;
  keywords: string[];
  years: number[];
  counts: number[];
  shares: number[];
  slope: number;
  count_slope: number;
  momentum: "Rising" | "Flat" | "Declining";
  degenerate: boolean;
}

export interface TrendsPayload {
  domain: string;
  report: {
    threshold: number;
    clusters: TrendPanelData[];
  };
}

export interface GraphNode {
  node_id: string;
  domain: string;
  cluster_index: number;
  keywords: string[];
  size: number;
  position: [number, number] | null;
}

export interface GraphEdge {
  node_a: string;
  node_b: string;
  similarity: number;
  cross_domain: boolean;
}

export interface GraphPayload {
  tau: number;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SearchHit {
  paper_id: string;
  score: number;
  rank: number;
  venue: string;
  year: number;
  citation_count: number | null;
}

export interface SearchPayload {
  domain: string;
  query: string;
  k: number;
  hits: SearchHit[];
}

export class SchemaError extends Error {}

function fail(where: string, detail: string): never {
  throw new SchemaError(`${where}: ${detail}`);
}

export function validatePoints(doc: unknown): PointsPayload {
  const d = doc as PointsPayload;
  if (!d || typeof d.domain !== "string" || !Array.isArray(d.points)) {
    fail("points", "missing domain or points array");
  }
  for (const p of d.points) {
    if (
      typeof p.paper_id !== "string" ||
      typeof p.x !== "number" ||
      typeof p.y !== "number" ||
      !Number.isInteger(p.cluster)
    ) {
      fail("points", `bad point entry ${JSON.stringify(p)}`);
    }
  }
  return d;
}

export function validateClusters(doc: unknown): ClustersPayload {
  const d = doc as ClustersPayload;
  if (!d || typeof d.domain !== "string" || !Array.isArray(d.clusters)) {
    fail("clusters", "missing domain or clusters array");
  }
  for (const c of d.clusters) {
    if (
      !Number.isInteger(c.cluster_index) ||
      !Array.isArray(c.keywords) ||
      c.keywords.length !== 3 ||
      typeof c.size !== "number"
    ) {
      fail("clusters", `bad cluster entry ${JSON.stringify(c)}`);
    }
  }
  return d;
}

export function validateGraph(doc: unknown): GraphPayload {
  const d = doc as GraphPayload;
  if (!d || !Array.isArray(d.nodes) || !Array.isArray(d.edges)) {
    fail("graph", "missing nodes or edges");
  }
  for (const e of d.edges) {
    if (typeof e.similarity !== "number" || typeof e.node_a !== "string") {
      fail("graph", `bad edge ${JSON.stringify(e)}`);
    }
  }
  return d;
}
