"""Ingestion: normalization, dedup, validation errors, idempotence."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdr.corpus import (
    CorpusStore,
    PaperRecord,
    ingest_records,
    normalize_title,
    record_id,
)
from rdr.errors import ContractError, MalformedRowError


class TestNormalizeTitle:
    def test_empty(self):
        assert normalize_title("") == ""

    def test_tabs_and_runs_collapse(self):
        assert normalize_title("  OccWorld:\tA  World Model ") == "occworld: a world model"

    def test_case_fold_only(self):
        assert normalize_title("ABC") == "abc"

    def test_nfc(self):
        # e + combining acute composes to the same id as precomposed e-acute
        assert normalize_title("Café") == normalize_title("Café")

    @given(st.text(max_size=80))
    @settings(max_examples=100, deadline=None)
    def test_idempotent(self, raw):
        once = normalize_title(raw)
        assert normalize_title(once) == once


def test_record_id_stable_across_formattings():
    assert record_id("A  Big\tPaper") == record_id("a big paper")
    assert record_id("A Big Paper") != record_id("another paper")


def _write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")


def _row(title, year=2024, **kw):
    row = {
        "title": title,
        "authors": ["A. Author"],
        "abstract": f"About {title}.",
        "venue": "CVPR",
        "year": year,
    }
    row.update(kw)
    return row


class TestIngest:
    def test_empty_stream(self, tmp_path):
        src = tmp_path / "empty.jsonl"
        src.write_text("")
        stats = ingest_records(src, "jsonl", tmp_path / "store")
        assert stats.total == 0

    def test_dedupe_keeps_first(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(
            src,
            [
                _row("OccWorld: A World Model", abstract="first occurrence"),
                _row("Something Else"),
                _row("  occworld:  a world model", abstract="duplicate"),
            ],
        )
        stats = ingest_records(src, "jsonl", tmp_path / "store")
        assert stats.total == 2
        store = CorpusStore.open(tmp_path / "store")
        kept = store.get(record_id("OccWorld: A World Model"))
        assert kept.abstract == "first occurrence"

    def test_missing_field_names_row_and_field(self, tmp_path):
        src = tmp_path / "c.jsonl"
        rows = [_row("ok"), {"title": "no abstract", "venue": "CVPR", "year": 2024}]
        _write_jsonl(src, rows)
        with pytest.raises(MalformedRowError) as err:
            ingest_records(src, "jsonl", tmp_path / "store")
        assert err.value.row_number == 2
        assert err.value.field == "abstract"

    def test_year_out_of_range(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(src, [_row("too old", year=1850)])
        with pytest.raises(MalformedRowError) as err:
            ingest_records(src, "jsonl", tmp_path / "store")
        assert err.value.field == "year"

    def test_skip_mode_drops_bad_rows(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(src, [_row("good"), {"title": "bad", "year": 2024}])
        stats = ingest_records(src, "jsonl", tmp_path / "store", on_malformed="skip")
        assert stats.total == 1

    def test_optional_fields_retained_and_missing_ok(self, tmp_path):
        src = tmp_path / "c.jsonl"
        row = _row("with extras", pdf_url="http://x/y.pdf", citation_count=12)
        bare = _row("bare")
        del bare["authors"]
        _write_jsonl(src, [row, bare])
        stats = ingest_records(src, "jsonl", tmp_path / "store")
        assert stats.total == 2
        store = CorpusStore.open(tmp_path / "store")
        assert store.get(record_id("with extras")).citation_count == 12
        assert store.get(record_id("bare")).authors == []

    def test_csv_ingest(self, tmp_path):
        src = tmp_path / "c.csv"
        src.write_text(
            "title,authors,abstract,venue,year,pdf_url,citation_count\n"
            'One Paper,A. A.; B. B.,Some abstract,CoRL,2023,,5\n'
            "Two Paper,C. C.,More abstract,RSS,2024,,\n"
        )
        stats = ingest_records(src, "csv", tmp_path / "store")
        assert stats.total == 2
        store = CorpusStore.open(tmp_path / "store")
        rec = store.get(record_id("One Paper"))
        assert rec.authors == ["A. A.", "B. B."]
        assert rec.citation_count == 5
        assert store.get(record_id("Two Paper")).citation_count is None

    def test_idempotent_reingest(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(src, [_row("a"), _row("b"), _row("a ")])
        s1 = ingest_records(src, "jsonl", tmp_path / "store")
        first = (tmp_path / "store" / "records.jsonl").read_text()
        s2 = ingest_records(src, "jsonl", tmp_path / "store")
        second = (tmp_path / "store" / "records.jsonl").read_text()
        assert s1.total == s2.total == 2
        assert first == second

    def test_stats_sum_invariant(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(
            src,
            [_row(f"p{i}", year=2021 + i % 3, venue=v) for i, v in
             enumerate(["CVPR", "CoRL", "CVPR", "RSS", "CVPR"])],
        )
        stats = ingest_records(src, "jsonl", tmp_path / "store")
        stats.check_sum()
        assert stats.total == 5
        assert sum(sum(per.values()) for per in stats.venue_year_counts.values()) == 5

    def test_unreadable_source(self, tmp_path):
        with pytest.raises(OSError):
            ingest_records(tmp_path / "missing.jsonl", "jsonl", tmp_path / "store")

    def test_manifest_contents(self, tmp_path):
        src = tmp_path / "c.jsonl"
        _write_jsonl(src, [_row("a")])
        ingest_records(src, "jsonl", tmp_path / "store")
        manifest = json.loads((tmp_path / "store" / "manifest.json").read_text())
        assert manifest["format_version"] == 1
        assert manifest["record_count"] == 1
        assert "ingested_at" in manifest


def test_record_validation():
    with pytest.raises(ContractError):
        PaperRecord.create(title="  ", abstract="x", venue="V", year=2024)
    with pytest.raises(ContractError):
        PaperRecord.create(title="t", abstract="x", venue="V", year=2101)
    with pytest.raises(ContractError):
        PaperRecord.create(title="t", abstract="x", venue="V", year=2024, citation_count=-1)
