"""Text-to-vector projection with caching, plus the similarity and 2-D kernels.

Vectors are stored unit-normalized, so cosine similarity is a dot product
and Euclidean k-means on them is monotone in cosine distance. The provider
is pluggable; a content-hash cache guarantees each distinct text is embedded
at most once, and a documented import format lets precomputed vectors stand
in for provider access entirely.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    ContractError,
    DegenerateInputError,
    PreconditionError,
    UpstreamError,
)

DEFAULT_MODEL_ID = "nvidia/NV-Embed-v2"
UNIT_NORM_TOL = 1e-6


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    values: np.ndarray
    model_id: str
    content_hash: str

    def __post_init__(self):
        norm = float(np.linalg.norm(self.values))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ContractError(f"vector norm {norm} deviates from 1 beyond tolerance")


def _normalize(raw: np.ndarray) -> np.ndarray:
    v = np.asarray(raw, dtype=np.float64).ravel()
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ContractError("cannot unit-normalize a zero vector")
    return v / norm


class EmbeddingProvider(Protocol):
    def embed(self, text: str) -> np.ndarray: ...


class HashEmbeddingProvider:
    """Deterministic pseudo-embeddings for tests: hash seeds a Gaussian draw."""

    def __init__(self, dim: int = 8):
        self.dim = dim
        self.calls = 0

    def embed(self, text: str) -> np.ndarray:
        self.calls += 1
        seed = int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")
        return np.random.default_rng(seed).normal(size=self.dim)


class CacheMissProvider:
    """Offline stand-in: every uncached text is an error, not a network call."""

    def embed(self, text: str) -> np.ndarray:
        raise UpstreamError(
            "no embedding provider configured and text not found in cache "
            f"(content_hash {content_hash(text)[:12]}...)",
            status="offline",
        )


class HttpEmbeddingProvider:
    """Embeddings HTTP backend (config embedding.base_url, env RDR_EMBED_API_KEY)."""

    def __init__(self, base_url: str, model_id: str, api_key: str | None = None,
                 timeout: float = 120.0):
        if not base_url:
            raise ConfigurationError("missing base URL", key="embedding.base_url")
        key = api_key if api_key is not None else os.environ.get("RDR_EMBED_API_KEY", "")
        if not key:
            raise ConfigurationError("missing API key", key="RDR_EMBED_API_KEY")
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.api_key = key
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        import requests

        resp = requests.post(
            f"{self.base_url}/embeddings",
            json={"model": self.model_id, "input": text},
            headers={"Authorization": f"Bearer {self.api_key}"},
            timeout=self.timeout,
        )
        if resp.status_code != 200:
            raise UpstreamError(
                f"embedding provider returned {resp.status_code}: {resp.text[:300]}",
                status=resp.status_code,
            )
        return np.asarray(resp.json()["data"][0]["embedding"], dtype=np.float64)


class EmbeddingCache:
    """(content_hash, model_id) -> vector; append-only, never diverging.

    Disk layout per model id: a raw float64 vector file plus a JSONL index of
    {content_hash, row}. Dimension is discovered from the first stored vector.
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._entries: dict[tuple[str, str], np.ndarray] = {}
        self._dims: dict[str, int] = {}
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            self._load()

    @staticmethod
    def _safe(model_id: str) -> str:
        return model_id.replace("/", "__")

    def _files(self, model_id: str) -> tuple[Path, Path]:
        stem = self.directory / self._safe(model_id)
        return stem.with_suffix(".vecs"), stem.with_suffix(".index.jsonl")

    def _load(self) -> None:
        for idx_path in sorted(self.directory.glob("*.index.jsonl")):
            vec_path = idx_path.with_name(idx_path.name.replace(".index.jsonl", ".vecs"))
            rows = [json.loads(line) for line in idx_path.read_text().splitlines() if line]
            if not rows:
                continue
            model_id = rows[0]["model_id"]
            dim = rows[0]["dim"]
            matrix = np.fromfile(vec_path, dtype=np.float64).reshape(-1, dim)
            self._dims[model_id] = dim
            for row in rows:
                self._entries[(row["content_hash"], model_id)] = matrix[row["row"]]

    def get(self, chash: str, model_id: str) -> np.ndarray | None:
        return self._entries.get((chash, model_id))

    def put(self, chash: str, model_id: str, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        dim = self._dims.setdefault(model_id, values.size)
        if values.size != dim:
            raise ContractError(
                f"dimension {values.size} conflicts with established {dim} "
                f"for model {model_id!r}"
            )
        key = (chash, model_id)
        existing = self._entries.get(key)
        if existing is not None:
            if not np.array_equal(existing, values):
                raise ContractError(
                    f"refusing to overwrite cached vector for {chash[:12]}..."
                )
            return
        self._entries[key] = values
        if self.directory is not None:
            vec_path, idx_path = self._files(model_id)
            row = vec_path.stat().st_size // (8 * dim) if vec_path.exists() else 0
            with open(vec_path, "ab") as fh:
                fh.write(values.tobytes())
            entry = {"content_hash": chash, "model_id": model_id, "dim": dim, "row": row}
            with open(idx_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def __len__(self) -> int:
        return len(self._entries)


class Embedder:
    """embed_text with cache-first semantics over a pluggable provider."""

    def __init__(
        self,
        provider: EmbeddingProvider,
        model_id: str = DEFAULT_MODEL_ID,
        cache: EmbeddingCache | None = None,
    ):
        self.provider = provider
        self.model_id = model_id
        self.cache = cache if cache is not None else EmbeddingCache()

    def embed_text(self, text: str) -> EmbeddingVector:
        if not text:
            raise PreconditionError("cannot embed empty text")
        chash = content_hash(text)
        cached = self.cache.get(chash, self.model_id)
        if cached is not None:
            return EmbeddingVector(cached, self.model_id, chash)
        values = _normalize(self.provider.embed(text))
        self.cache.put(chash, self.model_id, values)
        return EmbeddingVector(values, self.model_id, chash)

    def import_vectors(self, path: str | Path) -> int:
        """Load precomputed vectors: one line per entry, id then d floats.

        Ids are content hashes of the exact texts the pipeline would embed.
        Vectors are unit-normalized on import. Returns the number loaded.
        """
        count = 0
        for line in Path(path).read_text().splitlines():
            parts = line.split()
            if not parts:
                continue
            chash = parts[0]
            values = _normalize(np.array([float(p) for p in parts[1:]]))
            self.cache.put(chash, self.model_id, values)
            count += 1
        return count


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Dot product of two unit vectors from the same model."""
    if u.model_id != v.model_id:
        raise ContractError(
            f"cosine across models {u.model_id!r} vs {v.model_id!r}"
        )
    return float(np.dot(u.values, v.values))


# --- 2-D projection -----------------------------------------------------------

_POWER_TOL = 1e-13
_POWER_ITERS = 1000


def _power_component(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Dominant right singular direction of centered data x via power iteration.

    Returns (unit direction, eigenvalue of x^T x). Never forms the d x d
    covariance; each step is two matvecs. The start vector is a seeded
    Gaussian draw: deterministic, and never axis-aligned with constructed
    fixtures the way a ones vector can be.
    """
    d = x.shape[1]
    v = _normalize(np.random.default_rng(0).normal(size=d))
    lam = -1.0
    norm = 0.0
    for _ in range(_POWER_ITERS):
        w = x.T @ (x @ v)
        norm = float(np.linalg.norm(w))
        if norm <= 1e-300:
            return v, 0.0
        v = w / norm
        if abs(norm - lam) <= _POWER_TOL * max(norm, 1.0):
            break
        lam = norm
    return v, norm


def _fix_signs(coords: np.ndarray) -> np.ndarray:
    for j in range(coords.shape[1]):
        col = coords[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            coords[:, j] = -col
    return coords


def project_2d(vectors: Sequence[EmbeddingVector] | np.ndarray) -> np.ndarray:
    """Top-2 principal-direction coordinates of the centered vectors.

    Components are ordered by explained variance, and each output column is
    signed so its largest-magnitude coordinate is positive. Collinear data
    legitimately produces an all-zero second column.
    """
    if isinstance(vectors, np.ndarray):
        matrix = np.asarray(vectors, dtype=np.float64)
    else:
        if len(vectors) >= 2:
            models = {v.model_id for v in vectors}
            if len(models) > 1:
                raise ContractError(f"mixed embedding models {sorted(models)}")
        matrix = np.array([v.values for v in vectors], dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise DegenerateInputError("projection needs at least 2 vectors")
    if np.allclose(matrix, matrix[0]):
        raise DegenerateInputError("projection needs at least 2 distinct points")

    centered = matrix - matrix.mean(axis=0)
    comp1, var1 = _power_component(centered)
    proj1 = centered @ comp1
    deflated = centered - np.outer(proj1, comp1)
    comp2, var2 = _power_component(deflated)
    proj2 = deflated @ comp2
    coords = np.column_stack([proj1, proj2])
    if var2 > var1:  # deflation guarantees var1 >= var2 up to rounding
        coords = coords[:, ::-1]
    return _fix_signs(coords)


# --- persisted per-run vector index --------------------------------------------


@dataclass
class VectorIndex:
    """Ordered ids with their unit vectors; the exact-search substrate."""

    ids: list[str]
    matrix: np.ndarray  # (n, d) float64, unit rows
    model_id: str

    def __post_init__(self):
        if len(self.ids) != self.matrix.shape[0]:
            raise ContractError("ids and matrix row count differ")

    @classmethod
    def build(cls, items: Sequence[tuple[str, EmbeddingVector]]) -> "VectorIndex":
        if not items:
            raise ContractError("cannot build an empty index")
        models = {v.model_id for _, v in items}
        if len(models) != 1:
            raise ContractError(f"mixed embedding models {sorted(models)}")
        ids = [pid for pid, _ in items]
        if len(set(ids)) != len(ids):
            raise ContractError("duplicate ids in index")
        matrix = np.array([v.values for _, v in items], dtype=np.float64)
        return cls(ids=ids, matrix=matrix, model_id=models.pop())

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "ids": self.ids,
            "model_id": self.model_id,
            "dim": int(self.matrix.shape[1]),
        }
        (directory / "index.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n"
        )
        self.matrix.astype(np.float64).tofile(directory / "vectors.f64")

    @classmethod
    def load(cls, directory: str | Path) -> "VectorIndex":
        directory = Path(directory)
        meta = json.loads((directory / "index.json").read_text())
        matrix = np.fromfile(directory / "vectors.f64", dtype=np.float64)
        matrix = matrix.reshape(len(meta["ids"]), meta["dim"])
        return cls(ids=meta["ids"], matrix=matrix, model_id=meta["model_id"])


def paper_text(title: str, abstract: str) -> str:
    """Canonical embedding input for general-domain runs."""
    return f"{title}\n\n{abstract}"
