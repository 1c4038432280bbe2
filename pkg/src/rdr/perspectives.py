"""Structured five-field extraction for every in-scope paper.

A schema is data, not code: five (symbol, title, definition) axes per
domain, shipped as a JSON file and overridable by user config. The model is
asked for a fixed '{"perspective 1": ...}' object; fields are stored
verbatim because they later become embedding input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import CorpusStore, PaperRecord
from .errors import ContractError, ExtractionError, FormatError
from .llm_gateway import LlmGateway, PromptRequest, extract_structured


@dataclass(frozen=True)
class PerspectiveAxis:
    symbol: str
    title: str
    definition_text: str


@dataclass(frozen=True)
class PerspectiveSchema:
    name: str
    axes: tuple[PerspectiveAxis, ...]

    def __post_init__(self):
        if len(self.axes) != 5:
            raise ContractError(f"schema {self.name!r} must define exactly 5 perspectives")
        symbols = [a.symbol for a in self.axes]
        if len(set(symbols)) != 5:
            raise ContractError(f"schema {self.name!r} has duplicate symbols {symbols}")


@dataclass
class PerspectiveExtraction:
    paper_id: str
    schema: str
    fields: list[str]
    raw_response: str

    def __post_init__(self):
        if len(self.fields) != 5 or any(not f.strip() for f in self.fields):
            raise ContractError("an extraction carries exactly 5 nonempty fields")

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "schema": self.schema,
            "fields": self.fields,
            "raw_response": self.raw_response,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PerspectiveExtraction":
        return cls(d["paper_id"], d["schema"], list(d["fields"]), d["raw_response"])


def load_schemas(path: str | Path | None = None) -> dict[str, PerspectiveSchema]:
    if path is None:
        text = resources.files("rdr.data").joinpath("perspective_schemas.json").read_text()
    else:
        text = Path(path).read_text()
    schemas = {}
    for name, axes in json.loads(text).items():
        schemas[name] = PerspectiveSchema(
            name=name,
            axes=tuple(
                PerspectiveAxis(a["symbol"], a["title"], a["definition"]) for a in axes
            ),
        )
    return schemas


def build_extraction_request(paper: PaperRecord, schema: PerspectiveSchema) -> PromptRequest:
    numbered = ", ".join(
        f"({i}) {axis.title}: {axis.definition_text}"
        for i, axis in enumerate(schema.axes, start=1)
    )
    fmt = ", ".join(f'"perspective {i}": plain text' for i in range(1, 6))
    user = (
        f"Can you analyze the paper contents according to the following perspectives: "
        f"{numbered}\n"
        f"After analysis, please identify each of the perspectives in the paper, "
        f"and return the answer in the following format: {{{fmt}}}\n\n"
        f"Title: {paper.title}\nAbstract: {paper.abstract}"
    )
    return PromptRequest(
        system_text="You analyze research papers along fixed perspectives.",
        user_text=user,
        model_tag="reasoning_model",
    )


def extract_perspectives(
    paper: PaperRecord, schema: PerspectiveSchema, gateway: LlmGateway
) -> PerspectiveExtraction:
    """One model call, one parsed five-field record in schema order."""
    result = gateway.complete(build_extraction_request(paper, schema))
    try:
        doc = extract_structured(result.text)
    except FormatError as exc:
        raise ExtractionError(f"paper {paper.id}: unparseable response") from exc
    fields = []
    for i, axis in enumerate(schema.axes, start=1):
        value = doc.get(f"perspective {i}")
        if value is None or not str(value).strip():
            raise ExtractionError(
                f"paper {paper.id}: response missing perspective {i} ({axis.title})"
            )
        fields.append(str(value))
    return PerspectiveExtraction(
        paper_id=paper.id, schema=schema.name, fields=fields, raw_response=result.text
    )


class ExtractionStore:
    """One JSONL file per schema, at most one record per (paper_id, schema)."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._records: dict[tuple[str, str], PerspectiveExtraction] = {}

    def path_for(self, schema_name: str) -> Path:
        return self.directory / f"{schema_name}.jsonl"

    def add(self, extraction: PerspectiveExtraction) -> None:
        key = (extraction.paper_id, extraction.schema)
        if key in self._records:
            raise ContractError(f"duplicate extraction for {key}")
        self._records[key] = extraction

    def get(self, paper_id: str, schema_name: str) -> PerspectiveExtraction:
        return self._records[(paper_id, schema_name)]

    def by_schema(self, schema_name: str) -> list[PerspectiveExtraction]:
        return [e for (_, s), e in sorted(self._records.items()) if s == schema_name]

    def __len__(self) -> int:
        return len(self._records)

    def save(self) -> None:
        by_schema: dict[str, list[PerspectiveExtraction]] = {}
        for (_, schema_name), ext in sorted(self._records.items()):
            by_schema.setdefault(schema_name, []).append(ext)
        for schema_name, extractions in by_schema.items():
            with open(self.path_for(schema_name), "w", encoding="utf-8") as fh:
                for ext in extractions:
                    fh.write(json.dumps(ext.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "ExtractionStore":
        store = cls(directory)
        for path in sorted(store.directory.glob("*.jsonl")):
            if path.name == "quarantine.jsonl":
                continue
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    store.add(PerspectiveExtraction.from_dict(json.loads(line)))
        return store


def perspective_corpus(
    ids: list[str],
    schema: PerspectiveSchema,
    corpus: CorpusStore,
    gateway: LlmGateway,
    store: ExtractionStore,
) -> list[tuple[str, str]]:
    """Extract every id into the store; returns quarantined (id, reason) pairs."""
    quarantined: list[tuple[str, str]] = []
    for pid in sorted(ids):
        try:
            store.add(extract_perspectives(corpus.get(pid), schema, gateway))
        except ExtractionError as exc:
            quarantined.append((pid, str(exc)))
    return quarantined
