/** Cluster landscape: one dot per paper at its server-computed position,
 * colored by cluster, with keyword labels at each cluster's label anchor.
 * The browser only maps delivered coordinates onto the viewport; it never
 * projects or re-scores anything. */

import type { ClustersPayload, PointsPayload } from "./types.js";

export const PALETTE = [
  "#2a6f97", "#e07a2f", "#3f8e5a", "#b0485c", "#7a5aa0",
  "#8a6f3c", "#d06aa8", "#5b5b5b", "#9aa33a", "#4ab3c9",
];

export interface LandscapeDot {
  paperId: string;
  cluster: number;
  cx: number;
  cy: number;
  color: string;
}

export interface ClusterLabel {
  cluster: number;
  text: string;
  x: number;
  y: number;
}

export interface LandscapeModel {
  width: number;
  height: number;
  dots: LandscapeDot[];
  labels: ClusterLabel[];
  center: { x: number; y: number };
}

export function buildLandscapeModel(
  points: PointsPayload,
  clusters: ClustersPayload,
  width = 640,
  height = 480,
): LandscapeModel {
  const pad = 30;
  const xs = points.points.map((p) => p.x);
  const ys = points.points.map((p) => p.y);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 0);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 0);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const sx = (x: number) => pad + ((x - minX) / spanX) * (width - 2 * pad);
  const sy = (y: number) => height - pad - ((y - minY) / spanY) * (height - 2 * pad);

  const dots: LandscapeDot[] = points.points.map((p) => ({
    paperId: p.paper_id,
    cluster: p.cluster,
    cx: sx(p.x),
    cy: sy(p.y),
    color: PALETTE[p.cluster % PALETTE.length],
  }));

  const labels: ClusterLabel[] = clusters.clusters.map((c) => {
    const members = dots.filter((d) => d.cluster === c.cluster_index);
    const mx = members.length
      ? members.reduce((acc, d) => acc + d.cx, 0) / members.length
      : width / 2;
    const my = members.length
      ? members.reduce((acc, d) => acc + d.cy, 0) / members.length
      : height / 2;
    return {
      cluster: c.cluster_index,
      text: c.keywords.join(" / "),
      x: mx,
      y: my,
    };
  });

  return { width, height, dots, labels, center: { x: width / 2, y: height / 2 } };
}

export interface LandscapeHandlers {
  onSelectCluster?: (cluster: number) => void;
}

export function renderLandscape(
  host: HTMLElement,
  model: LandscapeModel | null,
  handlers: LandscapeHandlers = {},
  highlighted: Set<string> = new Set(),
  recenterOn: string | null = null,
): void {
  host.textContent = "";
  if (model === null || model.dots.length === 0) {
    const empty = host.ownerDocument.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No papers in this run yet.";
    host.appendChild(empty);
    return;
  }
  const doc = host.ownerDocument;
  const svgNS = "http://www.w3.org/2000/svg";
  const svg = doc.createElementNS(svgNS, "svg");
  svg.setAttribute("class", "landscape");
  svg.setAttribute("width", String(model.width));
  svg.setAttribute("height", String(model.height));

  let viewCenter = model.center;
  if (recenterOn !== null) {
    const target = model.dots.find((d) => d.paperId === recenterOn);
    if (target) viewCenter = { x: target.cx, y: target.cy };
  }
  const vbX = viewCenter.x - model.width / 2;
  const vbY = viewCenter.y - model.height / 2;
  svg.setAttribute("viewBox", `${vbX} ${vbY} ${model.width} ${model.height}`);

  for (const dot of model.dots) {
    const circle = doc.createElementNS(svgNS, "circle");
    circle.setAttribute("class", "paper-dot");
    circle.setAttribute("data-paper-id", dot.paperId);
    circle.setAttribute("data-cluster", String(dot.cluster));
    circle.setAttribute("cx", dot.cx.toFixed(2));
    circle.setAttribute("cy", dot.cy.toFixed(2));
    circle.setAttribute("r", highlighted.has(dot.paperId) ? "7" : "4");
    circle.setAttribute("fill", dot.color);
    if (highlighted.has(dot.paperId)) {
      circle.setAttribute("class", "paper-dot highlighted");
      circle.setAttribute("stroke", "#111");
      circle.setAttribute("stroke-width", "2");
    }
    circle.addEventListener("click", () => handlers.onSelectCluster?.(dot.cluster));
    svg.appendChild(circle);
  }
  for (const label of model.labels) {
    const text = doc.createElementNS(svgNS, "text");
    text.setAttribute("class", "cluster-label");
    text.setAttribute("data-cluster", String(label.cluster));
    text.setAttribute("x", label.x.toFixed(2));
    text.setAttribute("y", label.y.toFixed(2));
    text.setAttribute("text-anchor", "middle");
    text.textContent = label.text;
    text.addEventListener("click", () => handlers.onSelectCluster?.(label.cluster));
    svg.appendChild(text);
  }
  host.appendChild(svg);
}

export function renderErrorBanner(host: HTMLElement, message: string): void {
  host.textContent = "";
  const banner = host.ownerDocument.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent = message;
  host.appendChild(banner);
}
