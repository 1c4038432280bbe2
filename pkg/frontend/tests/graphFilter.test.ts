/** Client tau filter: a pure function of the delivered edges, monotone in tau. */

import { describe, expect, it } from "vitest";

import { filterEdgesByTau, renderGraph } from "../src/graphView.js";
import type { GraphEdge, GraphPayload } from "../src/types.js";

function edge(a: string, b: string, similarity: number, cross = false): GraphEdge {
  return { node_a: a, node_b: b, similarity, cross_domain: cross };
}

const GRAPH: GraphPayload = {
  tau: 0.3,
  nodes: [
    { node_id: "fm/0", domain: "fm", cluster_index: 0, keywords: ["a", "b", "c"],
      size: 4, position: [0, 0] },
    { node_id: "fm/1", domain: "fm", cluster_index: 1, keywords: ["d", "e", "f"],
      size: 3, position: [1, 0.5] },
    { node_id: "rb/0", domain: "rb", cluster_index: 0, keywords: ["g", "h", "i"],
      size: 5, position: [0.5, 1] },
  ],
  edges: [
    edge("fm/0", "fm/1", 0.9),
    edge("fm/0", "rb/0", 0.61, true),
    edge("fm/1", "rb/0", 0.35, true),
  ],
};

describe("tau filtering", () => {
  it("keeps only edges at or above the view threshold", () => {
    expect(filterEdgesByTau(GRAPH.edges, 0.5)).toHaveLength(2);
    expect(filterEdgesByTau(GRAPH.edges, 0.95)).toHaveLength(0);
    expect(filterEdgesByTau(GRAPH.edges, -1)).toHaveLength(3);
  });

  it("raising tau never adds an edge across a scripted sweep", () => {
    let previous = Number.POSITIVE_INFINITY;
    for (const tau of [-1, -0.5, 0, 0.3, 0.36, 0.6, 0.62, 0.9, 0.91, 1]) {
      const count = filterEdgesByTau(GRAPH.edges, tau).length;
      expect(count).toBeLessThanOrEqual(previous);
      previous = count;
    }
  });

  it("filtered sets are nested as tau rises", () => {
    const low = new Set(filterEdgesByTau(GRAPH.edges, 0.2).map((e) => e.node_a + e.node_b));
    const high = new Set(filterEdgesByTau(GRAPH.edges, 0.7).map((e) => e.node_a + e.node_b));
    for (const key of high) expect(low.has(key)).toBe(true);
  });
});

describe("graph rendering", () => {
  function host(): HTMLElement {
    const el = document.createElement("div");
    document.body.appendChild(el);
    return el;
  }

  it("draws every node and the similarity attribute verbatim", () => {
    const el = host();
    renderGraph(el, GRAPH, 0.3);
    expect(el.querySelectorAll("circle.graph-node")).toHaveLength(3);
    const sims = [...el.querySelectorAll("line.edge, line.cross-domain")].map((l) =>
      Number(l.getAttribute("data-similarity")),
    );
    expect(sims.sort()).toEqual([0.35, 0.61, 0.9]);
  });

  it("re-rendering at higher tau drops edges from the DOM", () => {
    const el = host();
    renderGraph(el, GRAPH, 0.3);
    const before = el.querySelectorAll("line").length;
    renderGraph(el, GRAPH, 0.8);
    const after = el.querySelectorAll("line").length;
    expect(before).toBe(3);
    expect(after).toBe(1);
  });

  it("marks cross-domain edges", () => {
    const el = host();
    renderGraph(el, GRAPH, 0.3);
    expect(el.querySelectorAll("line.cross-domain")).toHaveLength(2);
  });
});
