"""Read-only JSON API over a completed run directory.

Every payload is derived from immutable stage outputs loaded at startup;
recomputation happens only through the CLI. Missing artifacts surface as
404s that name the stage to run; malformed queries as 400s.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import retrieval
from .clusterer import ClusterModel
from .config import PipelineConfig
from .corpus import CorpusStore
from .embedding import Embedder, VectorIndex
from .errors import PreconditionError, RdrError, UpstreamError
from .pipeline import build_embedder


class RunSnapshot:
    """All artifacts an endpoint may serve, loaded once, never mutated."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.run_dir = Path(config.run_dir)
        self.default_domain = config.domains[0]
        self.corpus: CorpusStore | None = None
        self.points: dict[str, list] = {}
        self.clusters: dict[str, list] = {}
        self.trends: dict[str, dict] = {}
        self.surveys: dict[str, dict] = {}
        self.graph: dict | None = None
        self.indexes: dict[str, VectorIndex] = {}
        self.models: dict[str, ClusterModel] = {}
        self.embedder: Embedder | None = None
        self._load()

    def _load(self) -> None:
        store_dir = self.run_dir / "ingest" / "store"
        if (store_dir / "manifest.json").exists():
            self.corpus = CorpusStore.open(store_dir)
        for domain in self.config.domains:
            cluster_dir = self.run_dir / "cluster" / domain
            if (cluster_dir / "points.json").exists():
                self.points[domain] = json.loads((cluster_dir / "points.json").read_text())
            if (cluster_dir / "summaries.json").exists():
                summaries = json.loads((cluster_dir / "summaries.json").read_text())
                model = ClusterModel.load(cluster_dir)
                self.models[domain] = model
                sizes = model.cluster_sizes()
                self.clusters[domain] = [
                    {
                        "cluster_index": int(idx),
                        "keywords": entry["keywords"],
                        "size": sizes[int(idx)],
                    }
                    for idx, entry in sorted(summaries.items(), key=lambda kv: int(kv[0]))
                ]
            trends_path = self.run_dir / "trends" / domain / "report.json"
            if trends_path.exists():
                self.trends[domain] = json.loads(trends_path.read_text())
            survey_path = self.run_dir / "survey" / domain / "survey.json"
            if survey_path.exists():
                self.surveys[domain] = json.loads(survey_path.read_text())
            embed_dir = self.run_dir / "embed" / domain
            if (embed_dir / "index.json").exists():
                self.indexes[domain] = VectorIndex.load(embed_dir)
        graph_path = self.run_dir / "graph" / "graph.json"
        if graph_path.exists():
            self.graph = json.loads(graph_path.read_text())
        if self.indexes:
            self.embedder = build_embedder(self.config)

    def search(self, text: str, k: int, domain: str) -> list[dict]:
        index = self.indexes.get(domain)
        if index is None or self.embedder is None:
            raise LookupError("embed")
        hits = retrieval.query(text, k, index, self.embedder, self.corpus)
        return [
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


def _make_handler(snapshot: RunSnapshot):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, code: int, payload) -> None:
            body = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _missing(self, stage: str) -> None:
            self._send(404, {"error": f"artifact not found; run stage {stage!r} first",
                             "stage": stage})

        def do_GET(self) -> None:  # noqa: N802 (http.server API)
            url = urlparse(self.path)
            params = {k: v[0] for k, v in parse_qs(url.query).items()}
            domain = params.get("domain", snapshot.default_domain)
            route = url.path.rstrip("/")
            try:
                if route == "/api/points":
                    payload = snapshot.points.get(domain)
                    if payload is None:
                        return self._missing("cluster")
                    return self._send(200, {"domain": domain, "points": payload})
                if route == "/api/clusters":
                    payload = snapshot.clusters.get(domain)
                    if payload is None:
                        return self._missing("cluster")
                    return self._send(200, {"domain": domain, "clusters": payload})
                if route == "/api/trends":
                    payload = snapshot.trends.get(domain)
                    if payload is None:
                        return self._missing("trends")
                    return self._send(200, {"domain": domain, "report": payload})
                if route == "/api/graph":
                    if snapshot.graph is None:
                        return self._missing("graph")
                    return self._send(200, snapshot.graph)
                if route == "/api/survey":
                    payload = snapshot.surveys.get(domain)
                    if payload is None:
                        return self._missing("survey")
                    return self._send(200, payload)
                if route == "/api/search":
                    text = params.get("q", "")
                    if not text.strip():
                        return self._send(400, {"error": "query parameter q must be nonempty"})
                    try:
                        k = int(params.get("k", str(snapshot.config.retrieval_k)))
                    except ValueError:
                        return self._send(400, {"error": "k must be an integer"})
                    if k < 0:
                        return self._send(400, {"error": "k must be nonnegative"})
                    try:
                        hits = snapshot.search(text, k, domain)
                    except LookupError as exc:
                        return self._missing(str(exc))
                    except (PreconditionError, UpstreamError) as exc:
                        return self._send(400, {"error": str(exc)})
                    return self._send(
                        200, {"domain": domain, "query": text, "k": k, "hits": hits}
                    )
                return self._send(404, {"error": f"unknown route {route!r}"})
            except RdrError as exc:
                return self._send(500, {"error": str(exc)})

    return Handler


class ApiServer:
    """Threaded HTTP server over one immutable run snapshot."""

    def __init__(self, config: PipelineConfig, port: int = 8000, host: str = "127.0.0.1"):
        self.snapshot = RunSnapshot(config)
        self.httpd = ThreadingHTTPServer((host, port), _make_handler(self.snapshot))
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
        self.httpd.server_close()


def serve(config: PipelineConfig, port: int, host: str = "127.0.0.1") -> ApiServer:
    """Blocking entry point used by the CLI serve subcommand."""
    server = ApiServer(config, port=port, host=host)
    print(f"serving run {config.run_dir} on http://{host}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return server
