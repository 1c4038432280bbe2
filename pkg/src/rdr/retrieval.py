"""Exact top-k semantic search over an embedded corpus.

The whole index is scanned on every query (corpus sizes make this
interactive) so the result is the definition of correctness: scores
non-increasing, ties broken by ascending paper id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import CorpusStore
from .embedding import Embedder, VectorIndex
from .errors import PreconditionError


@dataclass(frozen=True)
class SearchHit:
    paper_id: str
    score: float
    rank: int
    venue: str = ""
    year: int = 0
    citation_count: int | None = None


def query(
    text: str,
    k: int,
    index: VectorIndex,
    embedder: Embedder,
    corpus: CorpusStore | None = None,
) -> list[SearchHit]:
    """Embed the query, scan every vector, return the top-min(k, n) hits."""
    if not text or not text.strip():
        raise PreconditionError("query text must be nonempty")
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    if k == 0:
        return []

    vec = embedder.embed_text(text)
    scores = index.matrix @ vec.values
    ids = np.array(index.ids)
    # primary key: score descending; secondary: paper id ascending
    order = np.lexsort((ids, -scores))
    hits = []
    for rank, pos in enumerate(order[: min(k, len(ids))], start=1):
        pid = str(ids[pos])
        meta = corpus.get(pid) if corpus is not None and pid in corpus else None
        hits.append(
            SearchHit(
                paper_id=pid,
                score=float(scores[pos]),
                rank=rank,
                venue=meta.venue if meta else "",
                year=meta.year if meta else 0,
                citation_count=meta.citation_count if meta else None,
            )
        )
    return hits
