/** Search panel: validate locally (an empty query never leaves the browser),
 * render the ranked hits verbatim, and hand the hit ids back so the
 * landscape can highlight and recenter. */

import type { SearchHit } from "./types.js";

export function validateQuery(text: string): string | null {
  if (!text.trim()) {
    return "Enter a query first.";
  }
  return null;
}

export interface SearchHandlers {
  onPickHit?: (paperId: string) => void;
}

export function renderValidation(host: HTMLElement, message: string): void {
  host.textContent = "";
  const note = host.ownerDocument.createElement("p");
  note.className = "inline-validation";
  note.textContent = message;
  host.appendChild(note);
}

export function renderHits(
  host: HTMLElement,
  hits: SearchHit[],
  handlers: SearchHandlers = {},
): void {
  host.textContent = "";
  const doc = host.ownerDocument;
  if (hits.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "no-hits";
    empty.textContent = "No results.";
    host.appendChild(empty);
    return;
  }
  const list = doc.createElement("ol");
  list.className = "hit-list";
  for (const hit of hits) {
    const item = doc.createElement("li");
    item.className = "hit";
    item.setAttribute("data-paper-id", hit.paper_id);
    item.setAttribute("data-rank", String(hit.rank));
    const label = doc.createElement("span");
    label.className = "hit-meta";
    const citations = hit.citation_count === null ? "n/a" : String(hit.citation_count);
    label.textContent =
      `${hit.paper_id} — ${hit.venue} ${hit.year} — ` +
      `score ${hit.score.toFixed(4)} — citations ${citations}`;
    item.appendChild(label);
    item.addEventListener("click", () => handlers.onPickHit?.(hit.paper_id));
    list.appendChild(item);
  }
  host.appendChild(list);
}
