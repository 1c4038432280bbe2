"""Paper-metadata ingestion, validation, deduplication, and the record store.

The record id is a content hash of the normalized title, so ingestion is
idempotent and ids are stable across runs and platforms. Duplicates keep the
first occurrence. A completed store is immutable: a records file, an id
index, and a manifest with format version, record count, and timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ContractError, MalformedRowError

STORE_FORMAT_VERSION = 1
REQUIRED_FIELDS = ("title", "abstract", "venue", "year")
_WS = re.compile(r"\s+")


def normalize_title(raw: str) -> str:
    """NFC, lowercase, interior whitespace collapsed, ends stripped."""
    text = unicodedata.normalize("NFC", raw)
    return _WS.sub(" ", text).strip().lower()


def record_id(title: str) -> str:
    """Deterministic id: hash of the normalized title (16 hex chars)."""
    normalized = normalize_title(title)
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:16]


@dataclass
class PaperRecord:
    id: str
    title: str
    authors: list[str]
    abstract: str
    venue: str
    year: int
    pdf_url: str | None = None
    citation_count: int | None = None

    @classmethod
    def create(
        cls,
        title: str,
        abstract: str,
        venue: str,
        year: int,
        authors: list[str] | None = None,
        pdf_url: str | None = None,
        citation_count: int | None = None,
    ) -> "PaperRecord":
        rec = cls(
            id=record_id(title),
            title=title,
            authors=list(authors or []),
            abstract=abstract,
            venue=venue,
            year=int(year),
            pdf_url=pdf_url,
            citation_count=citation_count,
        )
        rec.validate()
        return rec

    def validate(self) -> None:
        if not normalize_title(self.title):
            raise ContractError("title is empty after normalization")
        if not (1900 <= self.year <= 2100):
            raise ContractError(f"year {self.year} outside [1900, 2100]")
        if self.citation_count is not None and self.citation_count < 0:
            raise ContractError("citation_count must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "authors": self.authors,
            "abstract": self.abstract,
            "venue": self.venue,
            "year": self.year,
            "pdf_url": self.pdf_url,
            "citation_count": self.citation_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PaperRecord":
        return cls(
            id=d["id"],
            title=d["title"],
            authors=list(d.get("authors") or []),
            abstract=d["abstract"],
            venue=d["venue"],
            year=int(d["year"]),
            pdf_url=d.get("pdf_url"),
            citation_count=d.get("citation_count"),
        )


@dataclass
class CorpusStats:
    venue_year_counts: dict[str, dict[int, int]] = field(default_factory=dict)
    total: int = 0

    def add(self, venue: str, year: int) -> None:
        per_year = self.venue_year_counts.setdefault(venue, {})
        per_year[year] = per_year.get(year, 0) + 1
        self.total += 1

    def check_sum(self) -> None:
        counted = sum(
            c for per_year in self.venue_year_counts.values() for c in per_year.values()
        )
        if counted != self.total:
            raise ContractError(f"stats total {self.total} != summed counts {counted}")

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "venues": {
                v: {str(y): c for y, c in sorted(per.items())}
                for v, per in sorted(self.venue_year_counts.items())
            },
        }


def _rows_from_jsonl(fh) -> Iterator[dict]:
    for raw in fh:
        if raw.strip():
            yield json.loads(raw)


def _rows_from_csv(fh) -> Iterator[dict]:
    for row in csv.DictReader(fh):
        out = dict(row)
        if out.get("authors"):
            out["authors"] = [a.strip() for a in out["authors"].split(";") if a.strip()]
        if out.get("citation_count"):
            out["citation_count"] = int(out["citation_count"])
        else:
            out["citation_count"] = None
        yield out


def _record_from_row(row: dict, row_number: int) -> PaperRecord:
    for name in REQUIRED_FIELDS:
        value = row.get(name)
        if value is None or (isinstance(value, str) and not value.strip()):
            raise MalformedRowError(row_number, name)
    try:
        year = int(row["year"])
    except (TypeError, ValueError):
        raise MalformedRowError(row_number, "year", f"not an integer: {row['year']!r}")
    if not (1900 <= year <= 2100):
        raise MalformedRowError(row_number, "year", f"{year} outside [1900, 2100]")
    if not normalize_title(str(row["title"])):
        raise MalformedRowError(row_number, "title", "empty after normalization")
    citations = row.get("citation_count")
    if citations is not None:
        try:
            citations = int(citations)
        except (TypeError, ValueError):
            raise MalformedRowError(row_number, "citation_count", f"not an integer: {citations!r}")
        if citations < 0:
            raise MalformedRowError(row_number, "citation_count", "negative")
    return PaperRecord.create(
        title=str(row["title"]),
        abstract=str(row["abstract"]),
        venue=str(row["venue"]),
        year=year,
        authors=row.get("authors"),
        pdf_url=row.get("pdf_url") or None,
        citation_count=citations,
    )


class CorpusStore:
    """Directory-backed, append-only record store with an id index."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._records: dict[str, PaperRecord] = {}

    @property
    def records_path(self) -> Path:
        return self.directory / "records.jsonl"

    @property
    def manifest_path(self) -> Path:
        return self.directory / "manifest.json"

    @classmethod
    def open(cls, directory: str | Path) -> "CorpusStore":
        store = cls(directory)
        if not store.manifest_path.exists():
            raise ContractError(f"no corpus store at {directory}")
        for line in store.records_path.read_text(encoding="utf-8").splitlines():
            rec = PaperRecord.from_dict(json.loads(line))
            store._records[rec.id] = rec
        return store

    def write(self, records: Iterable[PaperRecord]) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        lines = []
        for rec in records:
            self._records[rec.id] = rec
            lines.append(json.dumps(rec.to_dict(), sort_keys=True, ensure_ascii=False))
        self.records_path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        ids = sorted(self._records)
        (self.directory / "ids.json").write_text(json.dumps(ids, indent=0) + "\n")
        manifest = {
            "format_version": STORE_FORMAT_VERSION,
            "record_count": len(self._records),
            "ingested_at": datetime.now(timezone.utc).isoformat(),
        }
        self.manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._records

    def get(self, paper_id: str) -> PaperRecord:
        return self._records[paper_id]

    def ids(self) -> list[str]:
        return list(self._records)

    def records(self) -> list[PaperRecord]:
        return list(self._records.values())


def ingest_records(
    source: str | Path | io.TextIOBase,
    fmt: str,
    store_dir: str | Path,
    on_malformed: str = "raise",
) -> CorpusStats:
    """Read rows, validate, dedupe by id keeping the first, persist, count.

    on_malformed: "raise" fails on the first bad row (the error names the
    row number and field); "skip" drops bad rows and keeps going.
    """
    if fmt not in ("jsonl", "csv"):
        raise ContractError(f"unknown ingest format {fmt!r}")
    if on_malformed not in ("raise", "skip"):
        raise ContractError(f"on_malformed must be 'raise' or 'skip'")

    own = isinstance(source, (str, Path))
    fh = open(source, "r", encoding="utf-8") if own else source
    try:
        rows = _rows_from_jsonl(fh) if fmt == "jsonl" else _rows_from_csv(fh)
        retained: dict[str, PaperRecord] = {}
        stats = CorpusStats()
        for row_number, row in enumerate(rows, start=1):
            try:
                rec = _record_from_row(row, row_number)
            except MalformedRowError:
                if on_malformed == "raise":
                    raise
                continue
            if rec.id in retained:
                continue
            retained[rec.id] = rec
            stats.add(rec.venue, rec.year)
    finally:
        if own:
            fh.close()

    stats.check_sum()
    store = CorpusStore(store_dir)
    store.write(retained.values())
    return stats
