"""Pipeline configuration: a flat dotted-key JSON file.

Every knob has a documented default; numeric settings are range-checked and
referenced paths must exist at load time, with errors naming the offending
key path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError

DEFAULT_K_GENERAL = 30
DEFAULT_K_PERSPECTIVE = 20
DEFAULT_TAU = 0.55


@dataclass
class PipelineConfig:
    run_dir: str = "runs/default"
    corpus_source: str = ""
    corpus_format: str = "jsonl"
    domains: list[str] = field(default_factory=lambda: ["foundation_model", "robotics"])
    domain_definitions_path: str | None = None
    schema_path: str | None = None

    embedding_model_id: str = "nvidia/NV-Embed-v2"
    embedding_base_url: str = ""
    embedding_import: str | None = None
    embedding_mode: str = "general"  # general | perspective
    embedding_perspective: str | None = None  # axis symbol for perspective mode

    cluster_k_general: int = DEFAULT_K_GENERAL
    cluster_k_perspective: int = DEFAULT_K_PERSPECTIVE
    cluster_k_overrides: dict = field(default_factory=dict)  # domain -> k
    cluster_max_iters: int = 300

    trends_threshold: float = 0.005
    graph_tau: float = DEFAULT_TAU
    retrieval_k: int = 5
    survey_citations: int = 5

    llm_provider: str = "http"  # http | replay
    llm_base_url: str = ""
    llm_transcript: str | None = None  # replay source
    llm_transcript_log: str | None = None  # where live calls get recorded
    llm_filter_model: str = "filter-model"
    llm_reasoning_model: str = "reasoning-model"
    llm_max_retries: int = 3
    llm_concurrency: int = 4

    seed: int = 0

    _KEYMAP = {
        "run_dir": "run_dir",
        "corpus.source": "corpus_source",
        "corpus.format": "corpus_format",
        "domains": "domains",
        "domains.definitions": "domain_definitions_path",
        "perspectives.schemas": "schema_path",
        "embedding.model_id": "embedding_model_id",
        "embedding.base_url": "embedding_base_url",
        "embedding.import": "embedding_import",
        "embedding.mode": "embedding_mode",
        "embedding.perspective": "embedding_perspective",
        "cluster.k_general": "cluster_k_general",
        "cluster.k_perspective": "cluster_k_perspective",
        "cluster.k_overrides": "cluster_k_overrides",
        "cluster.max_iters": "cluster_max_iters",
        "trends.threshold": "trends_threshold",
        "graph.tau": "graph_tau",
        "retrieval.k": "retrieval_k",
        "survey.citations": "survey_citations",
        "llm.provider": "llm_provider",
        "llm.base_url": "llm_base_url",
        "llm.transcript": "llm_transcript",
        "llm.transcript_log": "llm_transcript_log",
        "llm.filter_model": "llm_filter_model",
        "llm.reasoning_model": "llm_reasoning_model",
        "llm.max_retries": "llm_max_retries",
        "llm.concurrency": "llm_concurrency",
        "seed": "seed",
    }

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigurationError(f"cannot read config: {exc}", key=str(path))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}", key=str(path))
        cfg = cls()
        valid_attrs = {f.name for f in fields(cls)}
        for key, value in doc.items():
            attr = cls._KEYMAP.get(key)
            if attr is None or attr not in valid_attrs:
                raise ConfigurationError("unknown configuration key", key=key)
            setattr(cfg, attr, value)
        cfg.validate(base_dir=path.parent)
        return cfg

    def validate(self, base_dir: Path | None = None) -> None:
        base = base_dir or Path(".")

        def resolve(p: str) -> Path:
            q = Path(p)
            return q if q.is_absolute() else base / q

        if self.corpus_format not in ("jsonl", "csv"):
            raise ConfigurationError(
                f"must be jsonl or csv, got {self.corpus_format!r}", key="corpus.format"
            )
        if self.embedding_mode not in ("general", "perspective"):
            raise ConfigurationError(
                f"must be general or perspective, got {self.embedding_mode!r}",
                key="embedding.mode",
            )
        if self.embedding_mode == "perspective" and not self.embedding_perspective:
            raise ConfigurationError(
                "perspective mode needs an axis symbol", key="embedding.perspective"
            )
        for key, value in (
            ("cluster.k_general", self.cluster_k_general),
            ("cluster.k_perspective", self.cluster_k_perspective),
            ("cluster.max_iters", self.cluster_max_iters),
            ("retrieval.k", self.retrieval_k),
            ("survey.citations", self.survey_citations),
            ("llm.concurrency", self.llm_concurrency),
        ):
            if int(value) < 1:
                raise ConfigurationError(f"must be >= 1, got {value}", key=key)
        if self.llm_max_retries < 0:
            raise ConfigurationError("must be >= 0", key="llm.max_retries")
        if not 0.0 <= self.trends_threshold:
            raise ConfigurationError("must be >= 0", key="trends.threshold")
        if self.llm_provider not in ("http", "replay"):
            raise ConfigurationError(
                f"must be http or replay, got {self.llm_provider!r}", key="llm.provider"
            )
        for key, value in (
            ("corpus.source", self.corpus_source or None),
            ("domains.definitions", self.domain_definitions_path),
            ("perspectives.schemas", self.schema_path),
            ("embedding.import", self.embedding_import),
            ("llm.transcript", self.llm_transcript),
        ):
            if value is not None and not resolve(value).exists():
                raise ConfigurationError(f"path does not exist: {value}", key=key)
        # anchor relative paths so stages resolve them identically later
        if base_dir is not None:
            for attr in (
                "corpus_source",
                "domain_definitions_path",
                "schema_path",
                "embedding_import",
                "llm_transcript",
                "llm_transcript_log",
                "run_dir",
            ):
                value = getattr(self, attr)
                if value:
                    setattr(self, attr, str(resolve(value)))

    def k_for(self, domain: str) -> int:
        if domain in self.cluster_k_overrides:
            return int(self.cluster_k_overrides[domain])
        if self.embedding_mode == "perspective":
            return self.cluster_k_perspective
        return self.cluster_k_general
