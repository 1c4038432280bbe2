/** Topology graph with a client-side tau filter. The server delivers every
 * edge at or above its configured threshold; the browser only hides edges
 * below the view threshold, so raising it can never add an edge. */

import type { GraphEdge, GraphPayload } from "./types.js";

export function filterEdgesByTau(edges: GraphEdge[], tauView: number): GraphEdge[] {
  return edges.filter((e) => e.similarity >= tauView);
}

export function renderGraph(
  host: HTMLElement,
  graph: GraphPayload,
  tauView: number,
): void {
  host.textContent = "";
  const doc = host.ownerDocument;
  const svgNS = "http://www.w3.org/2000/svg";
  const width = 520;
  const height = 420;
  const pad = 40;
  const svg = doc.createElementNS(svgNS, "svg");
  svg.setAttribute("class", "topology");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const positioned = graph.nodes.filter((n) => n.position !== null);
  const xs = positioned.map((n) => n.position![0]);
  const ys = positioned.map((n) => n.position![1]);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 1);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 1);
  const sx = (x: number) => pad + ((x - minX) / (maxX - minX || 1)) * (width - 2 * pad);
  const sy = (y: number) => height - pad - ((y - minY) / (maxY - minY || 1)) * (height - 2 * pad);
  const place = new Map<string, [number, number]>();
  graph.nodes.forEach((n, i) => {
    if (n.position) {
      place.set(n.node_id, [sx(n.position[0]), sy(n.position[1])]);
    } else {
      place.set(n.node_id, [pad + i * 40, pad]); // layout fallback, no positions
    }
  });

  for (const edge of filterEdgesByTau(graph.edges, tauView)) {
    const [x1, y1] = place.get(edge.node_a)!;
    const [x2, y2] = place.get(edge.node_b)!;
    const line = doc.createElementNS(svgNS, "line");
    line.setAttribute("class", edge.cross_domain ? "edge cross-domain" : "edge");
    line.setAttribute("data-similarity", String(edge.similarity));
    line.setAttribute("x1", x1.toFixed(1));
    line.setAttribute("y1", y1.toFixed(1));
    line.setAttribute("x2", x2.toFixed(1));
    line.setAttribute("y2", y2.toFixed(1));
    line.setAttribute("stroke", edge.cross_domain ? "#b0485c" : "#888");
    line.setAttribute("stroke-width", edge.cross_domain ? "2.5" : "1.5");
    svg.appendChild(line);
  }
  const domains = [...new Set(graph.nodes.map((n) => n.domain))].sort();
  for (const node of graph.nodes) {
    const [x, y] = place.get(node.node_id)!;
    const color = ["#2a6f97", "#e07a2f", "#3f8e5a", "#7a5aa0"][
      domains.indexOf(node.domain) % 4
    ];
    const circle = doc.createElementNS(svgNS, "circle");
    circle.setAttribute("class", "graph-node");
    circle.setAttribute("data-node-id", node.node_id);
    circle.setAttribute("cx", x.toFixed(1));
    circle.setAttribute("cy", y.toFixed(1));
    circle.setAttribute("r", String(6 + Math.sqrt(node.size)));
    circle.setAttribute("fill", color);
    const title = doc.createElementNS(svgNS, "title");
    title.textContent = `${node.node_id}: ${node.keywords.join(", ")} (${node.size})`;
    circle.appendChild(title);
    svg.appendChild(circle);
  }
  host.appendChild(svg);
}
