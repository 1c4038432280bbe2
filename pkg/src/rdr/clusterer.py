"""K-means partitioning of the embedded corpus plus per-cluster keywords.

Initialisation is D^2-weighted seeding from an explicit seed, iteration is
Lloyd's algorithm to an assignment fixpoint, and clusters that empty out
seize the point currently farthest from its own centroid. Everything is
deterministic given (corpus order, k, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ContractError, SummaryError
from .llm_gateway import LlmGateway, PromptRequest

MAX_ITERS = 300
SUMMARY_SAMPLE_SIZE = 50

KEYWORD_PROMPT = (
    "Can you summarize the following contents into three distinct keywords:\n"
    'Here is one example output:"keyphrase1, keyphrase2, keyphrase3".\n'
    "The output should be short and precise, with a single output for all papers.\n"
)


@dataclass
class ClusterModel:
    """Fitted partition: centroids, per-paper assignments, objective value."""

    k: int
    centroids: np.ndarray  # (k, d) float64
    assignments: dict[str, int]
    inertia: float
    seed: int
    model_id: str
    inertia_history: list[float] = field(default_factory=list, repr=False)

    def members(self, cluster_index: int) -> list[str]:
        return [pid for pid, c in self.assignments.items() if c == cluster_index]

    def cluster_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for c in self.assignments.values():
            sizes[c] += 1
        return sizes

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "k": self.k,
            "seed": self.seed,
            "inertia": self.inertia,
            "model_id": self.model_id,
            "dim": int(self.centroids.shape[1]),
        }
        (directory / "model.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n"
        )
        self.centroids.astype(np.float64).tofile(directory / "centroids.f64")
        lines = [f"{pid}\t{c}" for pid, c in sorted(self.assignments.items())]
        (directory / "assignments.tsv").write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "ClusterModel":
        directory = Path(directory)
        meta = json.loads((directory / "model.json").read_text())
        centroids = np.fromfile(directory / "centroids.f64", dtype=np.float64)
        centroids = centroids.reshape(meta["k"], meta["dim"])
        assignments = {}
        for line in (directory / "assignments.tsv").read_text().splitlines():
            pid, c = line.split("\t")
            assignments[pid] = int(c)
        return cls(
            k=meta["k"],
            centroids=centroids,
            assignments=assignments,
            inertia=meta["inertia"],
            seed=meta["seed"],
            model_id=meta["model_id"],
        )


@dataclass
class ClusterSummary:
    """Three keyphrases describing one cluster, plus the ids shown to the model."""

    cluster_index: int
    keywords: list[str]
    sample_ids: list[str]

    def __post_init__(self):
        if len(self.keywords) != 3 or any(not k.strip() for k in self.keywords):
            raise ContractError("a cluster summary carries exactly 3 nonempty keyphrases")


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    centroids[0] = x[rng.integers(n)]
    for i in range(1, k):
        _, d2 = _kernels.assign_labels(x, centroids[:i])
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[i] = x[idx]
    return centroids


def _repair_empty(labels: np.ndarray, sqdists: np.ndarray, k: int) -> bool:
    """Give each empty cluster the point farthest from its current centroid.

    Mutates labels/sqdists; returns True if anything moved. Candidate points
    must come from clusters with >1 member so the donor never empties.
    """
    counts = np.bincount(labels, minlength=k)
    moved = False
    for empty in np.flatnonzero(counts == 0):
        eligible = counts[labels] > 1
        if not eligible.any():
            break
        d = np.where(eligible, sqdists, -np.inf)
        victim = int(np.argmax(d))  # argmax keeps the lowest index on ties
        counts[labels[victim]] -= 1
        labels[victim] = empty
        counts[empty] = 1
        sqdists[victim] = 0.0
        moved = True
    return moved


def kmeans_arrays(
    x: np.ndarray, k: int, seed: int, max_iters: int = MAX_ITERS
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """Core fit on a raw (n, d) matrix.

    Returns (centroids, labels, inertia, per-iteration inertia history).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ContractError("expected a 2-D point matrix")
    n = x.shape[0]
    if k < 1:
        raise ContractError("k must be positive")
    if n < k:
        raise ContractError(f"corpus of {n} points cannot form {k} clusters")

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(x, k, rng)
    prev_labels = None
    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    sqdists = np.zeros(n, dtype=np.float64)

    for _ in range(max_iters):
        labels, sqdists = _kernels.assign_labels(x, centroids)
        history.append(float(sqdists.sum()))
        moved = _repair_empty(labels, sqdists, k)
        # a repair leaves its victim off the argmin centroid; never stop on it
        if not moved and prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        sums, counts = _kernels.centroid_sums(x, labels, k)
        np.maximum(counts, 1, out=counts)
        centroids = sums / counts[:, None]
        prev_labels = labels.copy()
    else:
        # iteration cap: one last assignment keeps labels argmin-consistent
        labels, sqdists = _kernels.assign_labels(x, centroids)
        history.append(float(sqdists.sum()))

    return centroids, labels, float(sqdists.sum()), history


def kmeans(index, k: int, seed: int, max_iters: int = MAX_ITERS) -> ClusterModel:
    """Fit a ClusterModel over a VectorIndex-like (ids, matrix, model_id)."""
    centroids, labels, inertia, history = kmeans_arrays(
        index.matrix, k, seed, max_iters
    )
    assignments = {pid: int(c) for pid, c in zip(index.ids, labels)}
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assignments,
        inertia=inertia,
        seed=seed,
        model_id=index.model_id,
        inertia_history=history,
    )


def _parse_keywords(text: str) -> list[str] | None:
    parts = [p.strip().strip('"').strip() for p in text.strip().split(",")]
    parts = [p for p in parts if p]
    return parts if len(parts) == 3 else None


def build_summary_request(
    model: ClusterModel, cluster_index: int, texts: dict[str, str], seed: int
) -> tuple[PromptRequest, list[str]]:
    """The keyword prompt over a seeded uniform sample of cluster members."""
    members = sorted(model.members(cluster_index))
    if not members:
        raise ContractError(f"cluster {cluster_index} is empty")
    rng = np.random.default_rng(seed)
    if len(members) > SUMMARY_SAMPLE_SIZE:
        picks = rng.choice(len(members), size=SUMMARY_SAMPLE_SIZE, replace=False)
        sample = [members[i] for i in sorted(picks)]
    else:
        sample = members
    body = "\n\n".join(texts[pid] for pid in sample)
    req = PromptRequest(
        system_text="You label clusters of research papers.",
        user_text=f"{KEYWORD_PROMPT}\n{body}",
        model_tag="reasoning_model",
    )
    return req, sample


def summarize_cluster(
    model: ClusterModel,
    cluster_index: int,
    texts: dict[str, str],
    seed: int,
    gateway: LlmGateway,
) -> ClusterSummary:
    """Sample up to 50 members, ask for exactly three keyphrases.

    One re-ask on a malformed response, then SummaryError so the caller can
    flag the cluster and keep going.
    """
    req, sample = build_summary_request(model, cluster_index, texts, seed)
    for attempt in range(2):
        result = gateway.complete(req)
        keywords = _parse_keywords(result.text)
        if keywords is not None:
            return ClusterSummary(
                cluster_index=cluster_index, keywords=keywords, sample_ids=sample
            )
    raise SummaryError(
        f"cluster {cluster_index}: response did not contain exactly 3 "
        f"comma-separated keyphrases after re-ask: {result.text!r}"
    )


def summarize_all(
    model: ClusterModel,
    texts: dict[str, str],
    seed: int,
    gateway: LlmGateway,
) -> tuple[list[ClusterSummary], list[tuple[int, str]]]:
    """Summaries for every cluster; failures flagged, never fatal."""
    summaries: list[ClusterSummary] = []
    flagged: list[tuple[int, str]] = []
    for c in range(model.k):
        try:
            summaries.append(summarize_cluster(model, c, texts, seed + c, gateway))
        except SummaryError as exc:
            flagged.append((c, str(exc)))
    return summaries, flagged


def save_summaries(summaries: Sequence[ClusterSummary], path: str | Path) -> None:
    doc = {
        str(s.cluster_index): {"keywords": s.keywords, "sample_ids": s.sample_ids}
        for s in summaries
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def load_summaries(path: str | Path) -> list[ClusterSummary]:
    doc = json.loads(Path(path).read_text())
    return [
        ClusterSummary(int(idx), entry["keywords"], entry["sample_ids"])
        for idx, entry in sorted(doc.items(), key=lambda kv: int(kv[0]))
    ]
