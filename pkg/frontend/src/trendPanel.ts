/** Trend panel for one selected cluster: keywords, momentum, and the yearly
 * share series as a polyline. Slopes and momentum arrive from the server. */

import type { TrendPanelData } from "./types.js";

export function renderTrendPanel(host: HTMLElement, panel: TrendPanelData | null): void {
  host.textContent = "";
  const doc = host.ownerDocument;
  if (panel === null) {
    const hint = doc.createElement("p");
    hint.className = "trend-hint";
    hint.textContent = "Select a cluster to see its trend.";
    host.appendChild(hint);
    return;
  }
  const title = doc.createElement("h3");
  title.className = "trend-title";
  title.textContent = `${panel.cluster_index}. ${panel.keywords.join(" / ")}`;
  host.appendChild(title);

  const momentum = doc.createElement("p");
  momentum.className = `trend-momentum momentum-${panel.momentum.toLowerCase()}`;
  momentum.setAttribute("data-momentum", panel.momentum);
  momentum.textContent = panel.degenerate
    ? `${panel.momentum} (single observed year)`
    : `${panel.momentum} (slope ${panel.slope.toExponential(3)} per year)`;
  host.appendChild(momentum);

  const svgNS = "http://www.w3.org/2000/svg";
  const width = 360;
  const height = 180;
  const pad = 28;
  const svg = doc.createElementNS(svgNS, "svg");
  svg.setAttribute("class", "trend-chart");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  const maxShare = Math.max(...panel.shares, 1e-9);
  const stepX = (width - 2 * pad) / Math.max(1, panel.years.length - 1);
  const coords = panel.shares.map((share, i) => {
    const x = pad + i * stepX;
    const y = height - pad - ((height - 2 * pad) * share) / maxShare;
    return `${x.toFixed(1)},${y.toFixed(1)}`;
  });
  const line = doc.createElementNS(svgNS, "polyline");
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "#2a6f97");
  line.setAttribute("stroke-width", "2");
  line.setAttribute("points", coords.join(" "));
  svg.appendChild(line);
  panel.years.forEach((year, i) => {
    const label = doc.createElementNS(svgNS, "text");
    label.setAttribute("class", "trend-year");
    label.setAttribute("x", (pad + i * stepX).toFixed(1));
    label.setAttribute("y", String(height - 8));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("font-size", "10");
    label.textContent = String(year);
    svg.appendChild(label);
  });
  host.appendChild(svg);

  const table = doc.createElement("table");
  table.className = "trend-table";
  const head = doc.createElement("tr");
  for (const col of ["year", "count", "share"]) {
    const th = doc.createElement("th");
    th.textContent = col;
    head.appendChild(th);
  }
  table.appendChild(head);
  panel.years.forEach((year, i) => {
    const tr = doc.createElement("tr");
    for (const value of [String(year), String(panel.counts[i]), panel.shares[i].toFixed(4)]) {
      const td = doc.createElement("td");
      td.textContent = value;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  host.appendChild(table);
}
