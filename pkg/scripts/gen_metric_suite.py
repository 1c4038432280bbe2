#!/usr/bin/env python3
"""Regenerate the bundled metric self-check suite.

Expected values come from the naive oracles in tests/conftest.py, never from
the library code the suite is meant to check.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import acc_oracle, ari_oracle, nmi_oracle  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "src" / "rdr" / "data" / "metric_suite.json"


def main() -> None:
    rng = np.random.default_rng(777)
    cases = []

    def add(name, pred, truth):
        cases.append(
            {
                "name": name,
                "pred": list(map(int, pred)),
                "truth": list(map(int, truth)),
                "expected": {
                    "acc": acc_oracle(pred, truth),
                    "nmi": nmi_oracle(pred, truth),
                    "ari": ari_oracle(pred, truth),
                },
            }
        )

    add("identity", [0, 1, 2, 0, 1], [0, 1, 2, 0, 1])
    add("permuted", [1, 2, 0, 1, 2], [0, 1, 2, 0, 1])
    add("half_right", [0, 1, 0, 1], [0, 0, 1, 1])
    add("one_cluster_vs_two", [0, 0, 0, 0], [0, 0, 1, 1])
    add("all_singletons", [0, 1, 2, 3], [3, 2, 1, 0])
    for i in range(15):
        n = int(rng.integers(6, 30))
        pred = rng.integers(0, int(rng.integers(2, 6)), size=n).tolist()
        truth = rng.integers(0, int(rng.integers(2, 6)), size=n).tolist()
        add(f"random_{i:02d}", pred, truth)

    OUT.write_text(json.dumps({"cases": cases}, sort_keys=True, indent=2) + "\n")
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
