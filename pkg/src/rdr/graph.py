"""Cross-domain topology graph over per-domain cluster nodes.

One node per (domain, cluster), an edge wherever the cosine of the two
unit-renormalized centroids clears the threshold; edges crossing domain
boundaries are flagged. Peripheral nodes surface via the isolation report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .clusterer import ClusterModel, ClusterSummary
from .embedding import project_2d
from .errors import ContractError, DegenerateInputError


@dataclass
class GraphNode:
    node_id: str
    domain: str
    cluster_index: int
    keywords: list[str]
    size: int
    position: tuple[float, float] | None = None


@dataclass
class GraphEdge:
    node_a: str
    node_b: str
    similarity: float
    cross_domain: bool


@dataclass
class TopologyGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)
    tau: float = 0.0

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "nodes": [
                {
                    "node_id": n.node_id,
                    "domain": n.domain,
                    "cluster_index": n.cluster_index,
                    "keywords": n.keywords,
                    "size": n.size,
                    "position": list(n.position) if n.position is not None else None,
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "node_a": e.node_a,
                    "node_b": e.node_b,
                    "similarity": e.similarity,
                    "cross_domain": e.cross_domain,
                }
                for e in self.edges
            ],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    def save_edge_list(self, path: str | Path) -> None:
        lines = [f"{e.node_a}\t{e.node_b}\t{e.similarity:.6f}" for e in self.edges]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))

    @classmethod
    def from_dict(cls, doc: dict) -> "TopologyGraph":
        g = cls(tau=doc["tau"])
        for n in doc["nodes"]:
            pos = tuple(n["position"]) if n.get("position") is not None else None
            g.nodes.append(
                GraphNode(n["node_id"], n["domain"], n["cluster_index"],
                          list(n["keywords"]), n["size"], pos)
            )
        for e in doc["edges"]:
            g.edges.append(
                GraphEdge(e["node_a"], e["node_b"], e["similarity"], e["cross_domain"])
            )
        return g


def build_graph(
    models: dict[str, tuple[ClusterModel, Sequence[ClusterSummary]]],
    tau: float,
) -> TopologyGraph:
    """Nodes for every (domain, cluster), edges where centroid cosine >= tau."""
    if not models:
        raise ContractError("at least one domain model is required")
    # tau above 1 is legal and simply unreachable: zero edges
    model_ids = {model.model_id for model, _ in models.values()}
    if len(model_ids) != 1:
        raise ContractError(f"models use different embedding models: {sorted(model_ids)}")

    nodes: list[GraphNode] = []
    directions: list[np.ndarray] = []
    for domain in sorted(models):
        model, summaries = models[domain]
        keywords = {s.cluster_index: s.keywords for s in summaries}
        sizes = model.cluster_sizes()
        for c in range(model.k):
            nodes.append(
                GraphNode(
                    node_id=f"{domain}/{c}",
                    domain=domain,
                    cluster_index=c,
                    keywords=list(keywords.get(c, ["", "", ""])),
                    size=sizes[c],
                )
            )
            centroid = model.centroids[c]
            norm = np.linalg.norm(centroid)
            directions.append(centroid / norm if norm > 0 else centroid)

    raw_centroids = np.array(
        [models[n.domain][0].centroids[n.cluster_index] for n in nodes]
    )
    try:
        coords = project_2d(raw_centroids)
        for node, xy in zip(nodes, coords):
            node.position = (float(xy[0]), float(xy[1]))
    except DegenerateInputError:
        pass  # positions stay None; a one-node graph has no layout

    edges: list[GraphEdge] = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            sim = float(np.dot(directions[i], directions[j]))
            if sim >= tau:
                edges.append(
                    GraphEdge(
                        node_a=nodes[i].node_id,
                        node_b=nodes[j].node_id,
                        similarity=sim,
                        cross_domain=nodes[i].domain != nodes[j].domain,
                    )
                )
    return TopologyGraph(nodes=nodes, edges=edges, tau=tau)


def isolation_report(g: TopologyGraph) -> list[tuple[str, int, int]]:
    """(node_id, degree, cross_degree), most isolated first."""
    degree = {n.node_id: 0 for n in g.nodes}
    cross = {n.node_id: 0 for n in g.nodes}
    for e in g.edges:
        degree[e.node_a] += 1
        degree[e.node_b] += 1
        if e.cross_domain:
            cross[e.node_a] += 1
            cross[e.node_b] += 1
    rows = [(nid, degree[nid], cross[nid]) for nid in degree]
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    return rows
