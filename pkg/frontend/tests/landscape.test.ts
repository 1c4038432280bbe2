/** Payload-to-DOM checks: the landscape shows exactly what the server sent. */

import { describe, expect, it } from "vitest";

import {
  buildLandscapeModel,
  renderErrorBanner,
  renderLandscape,
} from "../src/landscape.js";
import { validateClusters, validatePoints } from "../src/types.js";
import type { ClustersPayload, PointsPayload } from "../src/types.js";

const POINTS: PointsPayload = {
  domain: "robotics",
  points: [
    { paper_id: "p1", x: 0.0, y: 0.0, cluster: 0 },
    { paper_id: "p2", x: 1.0, y: 0.2, cluster: 0 },
    { paper_id: "p3", x: -1.0, y: 2.0, cluster: 1 },
    { paper_id: "p4", x: -1.2, y: 2.2, cluster: 1 },
  ],
};

const CLUSTERS: ClustersPayload = {
  domain: "robotics",
  clusters: [
    { cluster_index: 0, keywords: ["a", "b", "c"], size: 2 },
    { cluster_index: 1, keywords: ["d", "e", "f"], size: 2 },
  ],
};

function host(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

describe("landscape rendering", () => {
  it("renders one dot per paper and one label per cluster", () => {
    const el = host();
    renderLandscape(el, buildLandscapeModel(POINTS, CLUSTERS));
    expect(el.querySelectorAll("circle.paper-dot")).toHaveLength(4);
    const labels = [...el.querySelectorAll("text.cluster-label")];
    expect(labels).toHaveLength(2);
    expect(labels.map((l) => l.textContent)).toEqual(["a / b / c", "d / e / f"]);
  });

  it("uses distinct colors for the two clusters", () => {
    const el = host();
    renderLandscape(el, buildLandscapeModel(POINTS, CLUSTERS));
    const colors = new Set(
      [...el.querySelectorAll("circle.paper-dot")].map((c) => c.getAttribute("fill")),
    );
    expect(colors.size).toBe(2);
  });

  it("clicking a dot selects its cluster", () => {
    const el = host();
    const picked: number[] = [];
    renderLandscape(el, buildLandscapeModel(POINTS, CLUSTERS), {
      onSelectCluster: (c) => picked.push(c),
    });
    const dot = el.querySelector('circle[data-paper-id="p3"]') as SVGCircleElement;
    dot.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
    expect(picked).toEqual([1]);
  });

  it("shows the empty state for zero papers", () => {
    const el = host();
    renderLandscape(el, buildLandscapeModel({ domain: "robotics", points: [] }, CLUSTERS));
    expect(el.querySelector("svg")).toBeNull();
    expect(el.querySelector(".empty-state")?.textContent).toMatch(/No papers/);
  });

  it("highlights and enlarges searched papers", () => {
    const el = host();
    renderLandscape(
      el,
      buildLandscapeModel(POINTS, CLUSTERS),
      {},
      new Set(["p2"]),
    );
    const highlighted = el.querySelector('circle[data-paper-id="p2"]')!;
    const plain = el.querySelector('circle[data-paper-id="p1"]')!;
    expect(highlighted.getAttribute("r")).toBe("7");
    expect(plain.getAttribute("r")).toBe("4");
  });

  it("recenters the viewBox on a picked paper", () => {
    const el = host();
    const model = buildLandscapeModel(POINTS, CLUSTERS);
    renderLandscape(el, model, {}, new Set(), "p3");
    const target = model.dots.find((d) => d.paperId === "p3")!;
    const [vbX, vbY] = el
      .querySelector("svg")!
      .getAttribute("viewBox")!
      .split(" ")
      .map(Number);
    expect(vbX + model.width / 2).toBeCloseTo(target.cx, 5);
    expect(vbY + model.height / 2).toBeCloseTo(target.cy, 5);
  });

  it("schema mismatch raises before anything renders", () => {
    expect(() => validatePoints({ domain: "robotics", points: [{ paper_id: 1 }] }))
      .toThrow(/points/);
    expect(() =>
      validateClusters({
        domain: "r",
        clusters: [{ cluster_index: 0, keywords: ["only-one"], size: 1 }],
      }),
    ).toThrow(/clusters/);
  });

  it("error banner replaces the panel content, no partial render", () => {
    const el = host();
    renderLandscape(el, buildLandscapeModel(POINTS, CLUSTERS));
    renderErrorBanner(el, "Payload schema mismatch: points");
    expect(el.querySelectorAll("svg")).toHaveLength(0);
    expect(el.querySelector(".error-banner")?.textContent).toMatch(/schema mismatch/);
  });
});
