import { describe, expect, it } from "vitest";

import { SequenceGate } from "../src/seq.js";

describe("SequenceGate", () => {
  it("marks superseded requests stale", () => {
    const gate = new SequenceGate();
    const first = gate.begin();
    const second = gate.begin();
    expect(gate.isCurrent(first)).toBe(false);
    expect(gate.isCurrent(second)).toBe(true);
  });

  it("out-of-order completions keep only the newest", () => {
    const gate = new SequenceGate();
    const tokens = [gate.begin(), gate.begin(), gate.begin()];
    // responses arrive 2nd, 3rd, 1st: only the 3rd may render
    const rendered: number[] = [];
    for (const t of [tokens[1], tokens[2], tokens[0]]) {
      if (gate.isCurrent(t)) rendered.push(t);
    }
    expect(rendered).toEqual([tokens[2]]);
  });
});
