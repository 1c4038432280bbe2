import { describe, expect, it } from "vitest";

import { renderHits, renderValidation, validateQuery } from "../src/searchPanel.js";
import type { SearchHit } from "../src/types.js";

function host(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

const HITS: SearchHit[] = [
  { paper_id: "pA", score: 0.9876, rank: 1, venue: "CoRL", year: 2024, citation_count: 12 },
  { paper_id: "pB", score: 0.8123, rank: 2, venue: "RSS", year: 2023, citation_count: null },
];

describe("search panel", () => {
  it("rejects empty or whitespace queries locally", () => {
    expect(validateQuery("")).toMatch(/Enter a query/);
    expect(validateQuery("   ")).toMatch(/Enter a query/);
    expect(validateQuery("dexterous manipulation")).toBeNull();
  });

  it("renders hits with server-delivered venue, year, score, citations", () => {
    const el = host();
    renderHits(el, HITS);
    const items = [...el.querySelectorAll("li.hit")];
    expect(items).toHaveLength(2);
    expect(items[0].getAttribute("data-rank")).toBe("1");
    expect(items[0].textContent).toContain("CoRL 2024");
    expect(items[0].textContent).toContain("score 0.9876");
    expect(items[1].textContent).toContain("citations n/a");
  });

  it("clicking a hit hands back its paper id", () => {
    const el = host();
    const picked: string[] = [];
    renderHits(el, HITS, { onPickHit: (id) => picked.push(id) });
    (el.querySelector('li[data-paper-id="pB"]') as HTMLElement).dispatchEvent(
      new window.MouseEvent("click", { bubbles: true }),
    );
    expect(picked).toEqual(["pB"]);
  });

  it("inline validation replaces previous results", () => {
    const el = host();
    renderHits(el, HITS);
    renderValidation(el, "Enter a query first.");
    expect(el.querySelectorAll("li.hit")).toHaveLength(0);
    expect(el.querySelector(".inline-validation")?.textContent).toMatch(/Enter a query/);
  });
});
