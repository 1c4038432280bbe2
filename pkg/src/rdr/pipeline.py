"""Resumable pipeline stages over a content-addressed run directory.

Each stage reads only prior stage outputs, writes its artifacts plus one
manifest, and is individually re-runnable; the `pipeline` meta-command
chains them. A lock file serializes stages per run directory.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

from . import clusterer, graph, metrics, retrieval, survey, trends
from .area_filter import CorpusPartition, filter_corpus, load_domain_definitions
from .config import PipelineConfig
from .corpus import CorpusStore, ingest_records
from .embedding import (
    CacheMissProvider,
    Embedder,
    EmbeddingCache,
    HttpEmbeddingProvider,
    VectorIndex,
    paper_text,
    project_2d,
)
from .errors import ConfigurationError, ContractError, DependencyError
from .llm_gateway import LlmGateway, gateway_from_env
from .manifest import RunManifest, file_hash, tree_hashes
from .perspectives import ExtractionStore, load_schemas, perspective_corpus

STAGES = (
    "ingest",
    "filter",
    "extract",
    "embed",
    "cluster",
    "trends",
    "graph",
    "survey",
    "eval",
    "query",
)

_DEPENDS = {
    "ingest": (),
    "filter": ("ingest",),
    "extract": ("filter",),
    "embed": ("filter",),  # plus extract when embedding perspective fields
    "cluster": ("embed",),
    "trends": ("cluster",),
    "graph": ("cluster",),
    "survey": ("cluster", "embed"),
    "eval": (),
    "query": ("embed",),
}


def _deps_for(stage: str, config: PipelineConfig) -> tuple[str, ...]:
    deps = _DEPENDS[stage]
    if stage == "embed" and config.embedding_mode == "perspective":
        deps = deps + ("extract",)
    return deps

PIPELINE_CHAIN = ("ingest", "filter", "extract", "embed", "cluster", "trends", "graph", "survey")


@contextmanager
def run_lock(run_dir: Path):
    run_dir.mkdir(parents=True, exist_ok=True)
    lock_path = run_dir / ".lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ContractError(f"run directory is locked by another stage: {lock_path}")
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def _stage_dir(config: PipelineConfig, stage: str) -> Path:
    return Path(config.run_dir) / stage


def _require(config: PipelineConfig, stage: str) -> None:
    for dep in _deps_for(stage, config):
        if not (_stage_dir(config, dep) / "manifest.json").exists():
            raise DependencyError(stage, dep)


def build_gateway(config: PipelineConfig) -> LlmGateway:
    if config.llm_provider == "replay":
        if not config.llm_transcript:
            raise ConfigurationError("replay provider needs a transcript", key="llm.transcript")
        return gateway_from_env(
            transcript_path=config.llm_transcript_log,
            replay_transcript=config.llm_transcript,
            max_retries=config.llm_max_retries,
            max_concurrency=config.llm_concurrency,
        )
    if config.llm_base_url:
        os.environ.setdefault("RDR_LLM_BASE_URL", config.llm_base_url)
    return gateway_from_env(
        transcript_path=config.llm_transcript_log,
        filter_model_name=config.llm_filter_model,
        reasoning_model_name=config.llm_reasoning_model,
        max_retries=config.llm_max_retries,
        max_concurrency=config.llm_concurrency,
    )


def build_embedder(config: PipelineConfig) -> Embedder:
    cache = EmbeddingCache(Path(config.run_dir) / "embed" / "cache")
    if config.embedding_import:
        provider = CacheMissProvider()
        embedder = Embedder(provider, model_id=config.embedding_model_id, cache=cache)
        embedder.import_vectors(config.embedding_import)
        return embedder
    provider = HttpEmbeddingProvider(config.embedding_base_url, config.embedding_model_id)
    return Embedder(provider, model_id=config.embedding_model_id, cache=cache)


def _load_corpus(config: PipelineConfig) -> CorpusStore:
    return CorpusStore.open(_stage_dir(config, "ingest") / "store")


def _load_partition(config: PipelineConfig) -> CorpusPartition:
    return CorpusPartition.load(_stage_dir(config, "filter"))


def _domain_schema_name(domain: str) -> str:
    return domain  # schemas are keyed by domain name


def domain_texts(
    config: PipelineConfig,
    domain: str,
    corpus: CorpusStore,
    partition: CorpusPartition,
    extractions: ExtractionStore | None,
) -> dict[str, str]:
    """Embedding input per paper: title+abstract, or one extracted field."""
    ids = partition.domain_ids(domain)
    if config.embedding_mode == "general":
        return {pid: paper_text(corpus.get(pid).title, corpus.get(pid).abstract) for pid in ids}
    schemas = load_schemas(config.schema_path)
    schema = schemas[_domain_schema_name(domain)]
    axis_pos = {a.symbol: i for i, a in enumerate(schema.axes)}
    symbol = config.embedding_perspective
    if symbol not in axis_pos:
        raise ConfigurationError(
            f"axis {symbol!r} not in schema {schema.name!r}", key="embedding.perspective"
        )
    if extractions is None:
        raise DependencyError("embed", "extract")
    out = {}
    for pid in ids:
        ext = extractions.get(pid, schema.name)
        out[pid] = ext.fields[axis_pos[symbol]]
    return out


# --- stages ---------------------------------------------------------------


def stage_ingest(config: PipelineConfig) -> RunManifest:
    stage_dir = _stage_dir(config, "ingest")
    stage_dir.mkdir(parents=True, exist_ok=True)
    if not config.corpus_source:
        raise ConfigurationError("no corpus source configured", key="corpus.source")
    manifest = RunManifest(stage="ingest", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes["corpus_source"] = file_hash(config.corpus_source)
    stats = ingest_records(config.corpus_source, config.corpus_format, stage_dir / "store")
    (stage_dir / "stats.json").write_text(
        json.dumps(stats.to_dict(), sort_keys=True, indent=2) + "\n"
    )
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_filter(config: PipelineConfig) -> RunManifest:
    _require(config, "filter")
    stage_dir = _stage_dir(config, "filter")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="filter", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"ingest/{k}": v for k, v in tree_hashes(_stage_dir(config, "ingest")).items()
    }
    corpus = _load_corpus(config)
    defs = load_domain_definitions(config.domain_definitions_path)
    gateway = build_gateway(config)
    partition, raw = filter_corpus(corpus, defs, gateway)
    partition.save(stage_dir)
    with open(stage_dir / "verdicts.jsonl", "w", encoding="utf-8") as fh:
        for pid in sorted(raw):
            fh.write(json.dumps({"paper_id": pid, "response": raw[pid]}, sort_keys=True) + "\n")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_extract(config: PipelineConfig) -> RunManifest:
    _require(config, "extract")
    stage_dir = _stage_dir(config, "extract")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="extract", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"filter/{k}": v for k, v in tree_hashes(_stage_dir(config, "filter")).items()
    }
    corpus = _load_corpus(config)
    partition = _load_partition(config)
    schemas = load_schemas(config.schema_path)
    gateway = build_gateway(config)
    store = ExtractionStore(stage_dir)
    quarantined: list[tuple[str, str]] = []
    for domain in config.domains:
        schema = schemas[_domain_schema_name(domain)]
        ids = partition.domain_ids(domain)
        quarantined.extend(perspective_corpus(ids, schema, corpus, gateway, store))
    store.save()
    with open(stage_dir / "quarantine.jsonl", "w", encoding="utf-8") as fh:
        for pid, reason in quarantined:
            fh.write(json.dumps({"paper_id": pid, "reason": reason}, sort_keys=True) + "\n")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_embed(config: PipelineConfig) -> RunManifest:
    _require(config, "embed")
    stage_dir = _stage_dir(config, "embed")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="embed", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"filter/{k}": v for k, v in tree_hashes(_stage_dir(config, "filter")).items()
    }
    if config.embedding_import:
        manifest.input_hashes["embedding_import"] = file_hash(config.embedding_import)
    corpus = _load_corpus(config)
    partition = _load_partition(config)
    extractions = None
    if config.embedding_mode == "perspective":
        manifest.input_hashes.update(
            {f"extract/{k}": v for k, v in tree_hashes(_stage_dir(config, "extract")).items()}
        )
        extractions = ExtractionStore.load(_stage_dir(config, "extract"))
    embedder = build_embedder(config)
    for domain in config.domains:
        texts = domain_texts(config, domain, corpus, partition, extractions)
        items = [(pid, embedder.embed_text(texts[pid])) for pid in sorted(texts)]
        if not items:
            raise ContractError(f"domain {domain!r} has no papers to embed")
        index = VectorIndex.build(items)
        index.save(stage_dir / domain)
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_cluster(config: PipelineConfig) -> RunManifest:
    _require(config, "cluster")
    stage_dir = _stage_dir(config, "cluster")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="cluster", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"embed/{k}": v for k, v in tree_hashes(_stage_dir(config, "embed")).items()
    }
    corpus = _load_corpus(config)
    partition = _load_partition(config)
    extractions = None
    if config.embedding_mode == "perspective":
        extractions = ExtractionStore.load(_stage_dir(config, "extract"))
    gateway = build_gateway(config)
    for domain in config.domains:
        index = VectorIndex.load(_stage_dir(config, "embed") / domain)
        model = clusterer.kmeans(index, config.k_for(domain), config.seed,
                                 config.cluster_max_iters)
        domain_dir = stage_dir / domain
        model.save(domain_dir)
        texts = domain_texts(config, domain, corpus, partition, extractions)
        summaries, flagged = clusterer.summarize_all(model, texts, config.seed, gateway)
        clusterer.save_summaries(summaries, domain_dir / "summaries.json")
        (domain_dir / "flagged.json").write_text(
            json.dumps([{"cluster": c, "reason": r} for c, r in flagged],
                       sort_keys=True, indent=2) + "\n"
        )
        coords = project_2d(index.matrix)
        points = [
            {
                "paper_id": pid,
                "x": float(coords[i, 0]),
                "y": float(coords[i, 1]),
                "cluster": model.assignments[pid],
            }
            for i, pid in enumerate(index.ids)
        ]
        (domain_dir / "points.json").write_text(
            json.dumps(points, sort_keys=True, indent=2) + "\n"
        )
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_trends(config: PipelineConfig) -> RunManifest:
    _require(config, "trends")
    stage_dir = _stage_dir(config, "trends")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="trends", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"cluster/{k}": v for k, v in tree_hashes(_stage_dir(config, "cluster")).items()
    }
    corpus = _load_corpus(config)
    for domain in config.domains:
        domain_dir = _stage_dir(config, "cluster") / domain
        model = clusterer.ClusterModel.load(domain_dir)
        summaries = clusterer.load_summaries(domain_dir / "summaries.json")
        years = {pid: corpus.get(pid).year for pid in model.assignments}
        series = trends.compute_trends(model, years, config.trends_threshold)
        report = trends.trend_report(series, summaries, config.trends_threshold)
        out_dir = stage_dir / domain
        out_dir.mkdir(parents=True, exist_ok=True)
        trends.save_report(report, out_dir / "report.json")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_graph(config: PipelineConfig) -> RunManifest:
    _require(config, "graph")
    stage_dir = _stage_dir(config, "graph")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="graph", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"cluster/{k}": v for k, v in tree_hashes(_stage_dir(config, "cluster")).items()
    }
    models = {}
    for domain in config.domains:
        domain_dir = _stage_dir(config, "cluster") / domain
        model = clusterer.ClusterModel.load(domain_dir)
        summaries = clusterer.load_summaries(domain_dir / "summaries.json")
        models[domain] = (model, summaries)
    g = graph.build_graph(models, config.graph_tau)
    g.save(stage_dir / "graph.json")
    g.save_edge_list(stage_dir / "edges.tsv")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_survey(config: PipelineConfig) -> RunManifest:
    _require(config, "survey")
    stage_dir = _stage_dir(config, "survey")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="survey", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"cluster/{k}": v for k, v in tree_hashes(_stage_dir(config, "cluster")).items()
    }
    corpus = _load_corpus(config)
    gateway = build_gateway(config)
    embedder = build_embedder(config)
    for domain in config.domains:
        domain_dir = _stage_dir(config, "cluster") / domain
        model = clusterer.ClusterModel.load(domain_dir)
        summaries = clusterer.load_summaries(domain_dir / "summaries.json")
        index = VectorIndex.load(_stage_dir(config, "embed") / domain)
        document = survey.generate_survey(summaries, domain, gateway)
        document = survey.attach_citations(
            document, model, index, embedder, config.survey_citations, corpus
        )
        survey.validate_citations(document, model, corpus)
        out_dir = stage_dir / domain
        out_dir.mkdir(parents=True, exist_ok=True)
        document.save(out_dir / "survey.json")
        (out_dir / "survey.txt").write_text(survey.to_text_table(document))
        (out_dir / "survey.html").write_text(survey.to_html(document))
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


def stage_eval(config: PipelineConfig) -> RunManifest:
    """Recompute the bundled metric suite and assert every oracle value."""
    stage_dir = _stage_dir(config, "eval")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="eval", seed=config.seed, started_at=RunManifest.now())
    suite_text = resources.files("rdr.data").joinpath("metric_suite.json").read_text()
    manifest.input_hashes["metric_suite"] = hashlib.sha256(suite_text.encode()).hexdigest()
    suite = json.loads(suite_text)
    rows = []
    all_pass = True
    for case in suite["cases"]:
        ids = list(range(len(case["pred"])))
        pred = metrics.LabeledPartition.from_sequence(ids, case["pred"])
        truth = metrics.LabeledPartition.from_sequence(ids, case["truth"])
        got = {
            "acc": metrics.accuracy_hungarian(pred, truth),
            "nmi": metrics.nmi(pred, truth),
            "ari": metrics.ari(pred, truth),
        }
        ok = all(abs(got[m] - case["expected"][m]) <= 1e-9 for m in got)
        all_pass &= ok
        rows.append({"name": case["name"], "got": got, "expected": case["expected"], "pass": ok})
    report = {"cases": rows, "all_pass": all_pass}
    (stage_dir / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    if not all_pass:
        raise ContractError("bundled metric suite failed; see eval/report.json")
    return manifest


def run_query(
    config: PipelineConfig, text: str, k: int, domain: str | None = None
) -> list[retrieval.SearchHit]:
    _require(config, "query")
    domain = domain or config.domains[0]
    index = VectorIndex.load(_stage_dir(config, "embed") / domain)
    corpus = _load_corpus(config)
    embedder = build_embedder(config)
    return retrieval.query(text, k, index, embedder, corpus)


def stage_query(config: PipelineConfig, text: str, k: int, domain: str | None = None) -> RunManifest:
    stage_dir = _stage_dir(config, "query")
    stage_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(stage="query", seed=config.seed, started_at=RunManifest.now())
    manifest.input_hashes = {
        f"embed/{k2}": v for k2, v in tree_hashes(_stage_dir(config, "embed")).items()
    }
    hits = run_query(config, text, k, domain)
    doc = {
        "query": text,
        "k": k,
        "domain": domain or config.domains[0],
        "hits": [
            {
                "paper_id": h.paper_id,
                "score": h.score,
                "rank": h.rank,
                "venue": h.venue,
                "year": h.year,
                "citation_count": h.citation_count,
            }
            for h in hits
        ],
    }
    (stage_dir / "hits.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    manifest.output_hashes = tree_hashes(stage_dir)
    manifest.finished_at = RunManifest.now()
    manifest.save(stage_dir)
    return manifest


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "filter": stage_filter,
    "extract": stage_extract,
    "embed": stage_embed,
    "cluster": stage_cluster,
    "trends": stage_trends,
    "graph": stage_graph,
    "survey": stage_survey,
    "eval": stage_eval,
}


def run_stage(name: str, config: PipelineConfig) -> RunManifest:
    if name not in STAGES:
        raise ContractError(f"unknown stage {name!r}; expected one of {STAGES}")
    if name == "query":
        raise ContractError("the query stage needs text and k; use run_query/stage_query")
    with run_lock(Path(config.run_dir)):
        return _STAGE_FUNCS[name](config)


def run_pipeline(config: PipelineConfig) -> list[RunManifest]:
    manifests = []
    with run_lock(Path(config.run_dir)):
        for name in PIPELINE_CHAIN:
            manifests.append(_STAGE_FUNCS[name](config))
    return manifests
