"""Structured survey generation with retrieval-backed citations.

The model organizes cluster keywords into categories and sub-rows but never
emits paper ids: citations come from exact search restricted to each row's
clusters, which rules out fabricated references by construction. The
coverage invariant (every cluster appears somewhere) is validated after
generation with one corrective re-ask.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .clusterer import ClusterModel, ClusterSummary
from .corpus import CorpusStore
from .embedding import Embedder, VectorIndex
from .errors import ContractError, FormatError, SurveyError
from .llm_gateway import LlmGateway, PromptRequest, extract_structured
from .retrieval import query as search_query

DEFAULT_CITATIONS_PER_ROW = 5

STRUCTURE_PROMPT = (
    "Those are summarized keywords for a number of science papers clustered by "
    "abstract contents, however they are ambiguous, contents may overlap between "
    "clusters, can you summarize the information in a more structured way for "
    "audience with the following criteria: organize the topics into numbered "
    "categories, each split into sub-categories; for every sub-category state "
    "what is covered, list typical examples, and list the cluster ids it draws "
    "from. Every cluster id must appear in at least one sub-category.\n"
    "Return the answer as JSON: {\"categories\": [{\"title\": plain text, "
    "\"sub_rows\": [{\"sub_title\": plain text, \"what_is_covered\": plain text, "
    "\"typical_examples\": [plain text], \"cluster_ids\": [integer]}]}]}\n"
)


@dataclass
class SurveyRow:
    sub_title: str
    what_is_covered: str
    typical_examples: list[str]
    cluster_ids: list[int]
    citations: list[str] = field(default_factory=list)
    flagged: bool = False


@dataclass
class SurveyCategory:
    title: str
    sub_rows: list[SurveyRow]


@dataclass
class SurveyDocument:
    domain: str
    categories: list[SurveyCategory]

    def rows(self) -> list[SurveyRow]:
        return [r for c in self.categories for r in c.sub_rows]

    def covered_clusters(self) -> set[int]:
        return {cid for r in self.rows() for cid in r.cluster_ids}

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "categories": [
                {
                    "title": c.title,
                    "sub_rows": [
                        {
                            "sub_title": r.sub_title,
                            "what_is_covered": r.what_is_covered,
                            "typical_examples": r.typical_examples,
                            "cluster_ids": r.cluster_ids,
                            "citations": r.citations,
                            "flagged": r.flagged,
                        }
                        for r in c.sub_rows
                    ],
                }
                for c in self.categories
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SurveyDocument":
        return cls(
            domain=doc["domain"],
            categories=[
                SurveyCategory(
                    title=c["title"],
                    sub_rows=[
                        SurveyRow(
                            sub_title=r["sub_title"],
                            what_is_covered=r["what_is_covered"],
                            typical_examples=list(r["typical_examples"]),
                            cluster_ids=list(r["cluster_ids"]),
                            citations=list(r.get("citations", [])),
                            flagged=bool(r.get("flagged", False)),
                        )
                        for r in c["sub_rows"]
                    ],
                )
                for c in doc["categories"]
            ],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "SurveyDocument":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _keyword_block(summaries: Sequence[ClusterSummary]) -> str:
    return "\n".join(
        f"cluster {s.cluster_index}: {', '.join(s.keywords)}"
        for s in sorted(summaries, key=lambda s: s.cluster_index)
    )


def _parse_survey(text: str, domain: str) -> SurveyDocument:
    doc = extract_structured(text)
    categories = doc.get("categories")
    if not isinstance(categories, list) or not categories:
        raise FormatError("survey response lacks a categories list", raw_text=text)
    parsed = []
    for c in categories:
        rows = []
        for r in c.get("sub_rows", []):
            rows.append(
                SurveyRow(
                    sub_title=str(r.get("sub_title", "")).strip(),
                    what_is_covered=str(r.get("what_is_covered", "")).strip(),
                    typical_examples=[str(t) for t in r.get("typical_examples", [])],
                    cluster_ids=[int(i) for i in r.get("cluster_ids", [])],
                )
            )
        if not rows:
            raise FormatError("survey category without sub_rows", raw_text=text)
        parsed.append(SurveyCategory(title=str(c.get("title", "")).strip(), sub_rows=rows))
    return SurveyDocument(domain=domain, categories=parsed)


def build_survey_request(summaries: Sequence[ClusterSummary]) -> PromptRequest:
    return PromptRequest(
        system_text="You structure research-topic keywords into survey tables.",
        user_text=f"{STRUCTURE_PROMPT}\n{_keyword_block(summaries)}",
        model_tag="reasoning_model",
        max_output_tokens=8192,
    )


def generate_survey(
    summaries: Sequence[ClusterSummary], domain: str, gateway: LlmGateway
) -> SurveyDocument:
    """Structure the cluster keywords; re-ask once if any cluster is uncovered."""
    if not summaries:
        raise ContractError("at least one cluster summary is required")
    expected = {s.cluster_index for s in summaries}
    req = build_survey_request(summaries)
    user = req.user_text
    document = _parse_survey(gateway.complete(req).text, domain)
    missing, unknown = _coverage_problems(document, expected)
    if missing or unknown:
        notes = []
        if missing:
            notes.append(
                f"Your previous answer did not assign these cluster ids to any "
                f"sub-category: {sorted(missing)}."
            )
        if unknown:
            notes.append(f"These cluster ids do not exist: {sorted(unknown)}.")
        notes.append(
            f"Every cluster id in {sorted(expected)} must appear in at least one "
            f"sub-category, and no other ids may be used."
        )
        retry = PromptRequest(
            system_text=req.system_text,
            user_text=user + "\n\n" + " ".join(notes),
            model_tag=req.model_tag,
            max_output_tokens=req.max_output_tokens,
        )
        document = _parse_survey(gateway.complete(retry).text, domain)
        missing, unknown = _coverage_problems(document, expected)
        if missing or unknown:
            raise SurveyError(
                f"survey still violates cluster coverage: uncovered {sorted(missing)}, "
                f"unknown {sorted(unknown)}",
                uncovered=missing | unknown,
            )
    return document


def _coverage_problems(
    document: SurveyDocument, expected: set[int]
) -> tuple[set[int], set[int]]:
    covered = document.covered_clusters()
    return expected - covered, covered - expected


def attach_citations(
    document: SurveyDocument,
    model: ClusterModel,
    index: VectorIndex,
    embedder: Embedder,
    m: int = DEFAULT_CITATIONS_PER_ROW,
    corpus: CorpusStore | None = None,
) -> SurveyDocument:
    """Cite each row's nearest papers among the members of its own clusters."""
    if m < 1:
        raise ContractError("m must be positive")
    known = set(range(model.k))
    doc_clusters = document.covered_clusters()
    if not doc_clusters <= known:
        raise ContractError(
            f"survey clusters {sorted(doc_clusters - known)} missing from the model"
        )
    member_ids: dict[int, set[str]] = {c: set(model.members(c)) for c in range(model.k)}
    for row in document.rows():
        allowed: set[str] = set()
        for cid in row.cluster_ids:
            allowed |= member_ids.get(cid, set())
        allowed &= set(index.ids)
        if not allowed:
            row.flagged = True
            row.citations = []
            continue
        keep = [i for i, pid in enumerate(index.ids) if pid in allowed]
        restricted = VectorIndex(
            ids=[index.ids[i] for i in keep],
            matrix=index.matrix[keep],
            model_id=index.model_id,
        )
        row_text = f"{row.sub_title}\n\n{row.what_is_covered}"
        hits = search_query(row_text, m, restricted, embedder, corpus)
        row.citations = [h.paper_id for h in hits]
    return document


def validate_citations(document: SurveyDocument, model: ClusterModel, corpus: CorpusStore) -> None:
    """Citation membership: every cited id exists and sits in one of the row's clusters."""
    for row in document.rows():
        allowed: set[str] = set()
        for cid in row.cluster_ids:
            allowed |= set(model.members(cid))
        for pid in row.citations:
            if pid not in corpus:
                raise ContractError(f"cited paper {pid} is not in the corpus")
            if pid not in allowed:
                raise ContractError(
                    f"cited paper {pid} is outside clusters {row.cluster_ids}"
                )


def to_text_table(document: SurveyDocument) -> str:
    lines = [f"Survey: {document.domain}", "=" * (8 + len(document.domain)), ""]
    for ci, cat in enumerate(document.categories, start=1):
        lines.append(f"{ci}. {cat.title}")
        for ri, row in enumerate(cat.sub_rows, start=1):
            lines.append(f"  {ci}.{ri} {row.sub_title}")
            lines.append(f"      covers: {row.what_is_covered}")
            if row.typical_examples:
                lines.append(f"      examples: {'; '.join(row.typical_examples)}")
            lines.append(f"      clusters: {', '.join(map(str, row.cluster_ids))}")
            if row.citations:
                lines.append(f"      citations: {', '.join(row.citations)}")
            if row.flagged:
                lines.append("      [flagged: no members available for citation]")
        lines.append("")
    return "\n".join(lines)


def to_html(document: SurveyDocument) -> str:
    esc = html.escape
    rows_html = []
    for ci, cat in enumerate(document.categories, start=1):
        rows_html.append(
            f'<tr class="category"><td colspan="5">{ci}. {esc(cat.title)}</td></tr>'
        )
        for ri, row in enumerate(cat.sub_rows, start=1):
            rows_html.append(
                "<tr>"
                f"<td>{ci}.{ri} {esc(row.sub_title)}</td>"
                f"<td>{esc(row.what_is_covered)}</td>"
                f"<td>{esc('; '.join(row.typical_examples))}</td>"
                f"<td>{esc(', '.join(map(str, row.cluster_ids)))}</td>"
                f"<td>{esc(', '.join(row.citations))}</td>"
                "</tr>"
            )
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>Survey: {esc(document.domain)}</title>"
        "<style>table{border-collapse:collapse}td,th{border:1px solid #999;"
        "padding:4px 8px;font:13px sans-serif}tr.category td{background:#eee;"
        "font-weight:bold}</style></head><body>"
        f"<h1>Survey: {esc(document.domain)}</h1>"
        "<table><tr><th>Sub-category</th><th>What is covered</th>"
        "<th>Typical examples</th><th>Clusters</th><th>Citations</th></tr>"
        + "".join(rows_html)
        + "</table></body></html>\n"
    )
