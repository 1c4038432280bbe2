"""Command-line entry points: one subcommand per pipeline stage plus
`pipeline`, `query`, `serve`, `plot-trends`, and the clustering-protocol
evaluation over precomputed vectors."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import api, metrics, pipeline, trends
from .clusterer import kmeans_arrays
from .config import PipelineConfig
from .errors import RdrError


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    if args.config:
        cfg = PipelineConfig.load(args.config)
    else:
        cfg = PipelineConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "run_dir", None):
        cfg.run_dir = args.run_dir
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key-value JSON config file")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--run-dir", default=None, help="override config run_dir")


def cmd_stage(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    manifest = pipeline.run_stage(args.stage, cfg)
    print(f"stage {manifest.stage}: {len(manifest.output_hashes)} artifacts")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    for manifest in pipeline.run_pipeline(cfg):
        print(f"stage {manifest.stage}: {len(manifest.output_hashes)} artifacts")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    if args.index:
        cfg.run_dir = args.index
    hits = pipeline.run_query(cfg, args.text, args.k, args.domain)
    doc = [
        {
            "paper_id": h.paper_id,
            "score": h.score,
            "rank": h.rank,
            "venue": h.venue,
            "year": h.year,
            "citation_count": h.citation_count,
        }
        for h in hits
    ]
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    api.serve(cfg, port=args.port, host=args.host)
    return 0


def cmd_plot_trends(args: argparse.Namespace) -> int:
    report = trends.load_report(args.report)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for panel in report["clusters"]:
        svg = trends.render_trend_svg(panel)
        (out_dir / f"cluster_{panel['cluster_index']:03d}.svg").write_text(svg)
    print(f"wrote {len(report['clusters'])} charts to {out_dir}")
    return 0


def _read_import_vectors(path: str) -> tuple[list[str], np.ndarray]:
    ids, rows = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        ids.append(parts[0])
        rows.append([float(p) for p in parts[1:]])
    matrix = np.array(rows, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return ids, matrix / norms


def cmd_eval_clustering(args: argparse.Namespace) -> int:
    """Clustering protocol over precomputed vectors: ACC/NMI/ARI across seeds."""
    ids, matrix = _read_import_vectors(args.vectors)
    labels = {}
    for line in Path(args.labels).read_text().splitlines():
        parts = line.split()
        if parts:
            labels[parts[0]] = int(parts[1])
    missing = [i for i in ids if i not in labels]
    if missing:
        print(f"error: {len(missing)} vectors lack labels (e.g. {missing[0]})", file=sys.stderr)
        return 2
    truth = metrics.LabeledPartition.from_sequence(ids, [labels[i] for i in ids])
    seeds = [int(s) for s in args.seeds.split(",")]
    per_seed = []
    for seed in seeds:
        _, assignment, _, _ = kmeans_arrays(matrix, args.k, seed)
        pred = metrics.LabeledPartition.from_sequence(ids, assignment.tolist())
        per_seed.append(
            {
                "seed": seed,
                "acc": metrics.accuracy_hungarian(pred, truth),
                "nmi": metrics.nmi(pred, truth),
                "ari": metrics.ari(pred, truth),
            }
        )
    report = {"dataset": args.name, "k": args.k, "seeds": seeds, "runs": per_seed}
    for key in ("acc", "nmi", "ari"):
        values = [r[key] for r in per_seed]
        report[f"{key}_mean"] = float(np.mean(values))
        report[f"{key}_std"] = float(np.std(values))
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdr",
        description="Corpus analytics pipeline: filter, extract, embed, cluster, "
        "trend, graph, survey, and search research papers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for stage in ("ingest", "filter", "extract", "embed", "cluster", "trends",
                  "graph", "survey", "eval"):
        p = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_common(p)
        p.set_defaults(func=cmd_stage, stage=stage)

    p = sub.add_parser("pipeline", help="run all stages in order")
    _add_common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("query", help="semantic top-k search over an embedded run")
    _add_common(p)
    p.add_argument("--text", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--index", default=None, help="run directory holding the index")
    p.add_argument("--domain", default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="read-only JSON API over a finished run")
    _add_common(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("plot-trends", help="emit one SVG line chart per cluster")
    p.add_argument("--report", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot_trends)

    p = sub.add_parser(
        "eval-clustering",
        help="ACC/NMI/ARI of seeded k-means over precomputed vectors",
    )
    p.add_argument("--vectors", required=True, help="import file: id then d floats per line")
    p.add_argument("--labels", required=True, help="labels file: id then integer class")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--name", default="dataset")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_clustering)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RdrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
