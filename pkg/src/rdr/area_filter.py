"""Per-paper domain classification and corpus partitioning.

Each paper gets one prompt carrying both domain definitions and must answer
with a fixed yes/no vocabulary per domain; the two verdicts map onto one of
four labels. Papers whose verdicts cannot be parsed land in a quarantine
list with a reason, never silently dropped, so the partition plus quarantine
always accounts for the whole corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .corpus import CorpusStore, PaperRecord
from .errors import ClassificationError, ContractError, FormatError, PreconditionError
from .llm_gateway import LlmGateway, PromptRequest, extract_structured


@dataclass(frozen=True)
class DomainDefinition:
    name: str
    display_name: str
    definition_text: str
    key_indicators: tuple[str, ...]

    def __post_init__(self):
        if not self.definition_text:
            raise ContractError("definition_text must be nonempty")
        if not self.key_indicators:
            raise ContractError("at least one key indicator is required")


class DomainLabel(Enum):
    FOUNDATION_MODEL = "FoundationModel"
    ROBOTICS = "Robotics"
    BOTH = "Both"
    NEITHER = "Neither"


@dataclass(frozen=True)
class DomainVerdict:
    label: DomainLabel
    raw_response: str


def load_domain_definitions(path: str | Path | None = None) -> list[DomainDefinition]:
    """Load definitions from a file, or the two built-in defaults."""
    if path is None:
        text = resources.files("rdr.data").joinpath("domain_definitions.json").read_text()
    else:
        text = Path(path).read_text()
    defs = []
    for block in json.loads(text):
        defs.append(
            DomainDefinition(
                name=block["name"],
                display_name=block.get("display_name", block["name"]),
                definition_text=block["definition"],
                key_indicators=tuple(block["key_indicators"]),
            )
        )
    return defs


CLASSIFY_SYSTEM = (
    "You decide whether a research paper belongs to specific research domains. "
    "Judge only from the title and abstract given. Answer strictly in JSON with "
    'one key per domain and the single-token value "yes" or "no".'
)


def build_classify_request(paper: PaperRecord, defs: list[DomainDefinition]) -> PromptRequest:
    blocks = []
    for d in defs:
        indicators = "\n".join(f"- {ind}" for ind in d.key_indicators)
        blocks.append(
            f'{d.display_name} Definition: "{d.definition_text}"\nKey Indicators:\n{indicators}'
        )
    keys = ", ".join(f'"{d.name}": "yes" or "no"' for d in defs)
    user = (
        "\n\n".join(blocks)
        + "\n\nDoes the following paper belong to each domain above?"
        + f"\nRespond with exactly {{{keys}}}."
        + f"\n\nTitle: {paper.title}\nAbstract: {paper.abstract}"
    )
    return PromptRequest(system_text=CLASSIFY_SYSTEM, user_text=user, model_tag="filter_model")


def _to_label(verdicts: dict, defs: list[DomainDefinition]) -> DomainLabel:
    flags = {}
    for d in defs:
        value = str(verdicts.get(d.name, "")).strip().lower()
        if value not in ("yes", "no"):
            raise ClassificationError(
                f"verdict for domain {d.name!r} must be yes/no, got {value!r}"
            )
        flags[d.name] = value == "yes"
    fm = flags.get("foundation_model", False)
    rb = flags.get("robotics", False)
    if fm and rb:
        return DomainLabel.BOTH
    if fm:
        return DomainLabel.FOUNDATION_MODEL
    if rb:
        return DomainLabel.ROBOTICS
    return DomainLabel.NEITHER


def classify_domain(
    paper: PaperRecord, defs: list[DomainDefinition], gateway: LlmGateway
) -> DomainVerdict:
    """One filter-model verdict per domain, mapped to a single label."""
    if not paper.title.strip() or not paper.abstract.strip():
        raise PreconditionError(f"paper {paper.id}: title and abstract must be nonempty")
    if len(defs) < 2:
        raise PreconditionError("both domain definitions are required")
    result = gateway.complete(build_classify_request(paper, defs))
    try:
        verdicts = extract_structured(result.text)
    except FormatError as exc:
        raise ClassificationError(f"unparseable verdict: {result.text!r}") from exc
    return DomainVerdict(label=_to_label(verdicts, defs), raw_response=result.text)


@dataclass
class CorpusPartition:
    """Disjoint id lists whose union (with quarantine) is the corpus."""

    fm_only: list[str] = field(default_factory=list)
    robotics_only: list[str] = field(default_factory=list)
    both: list[str] = field(default_factory=list)
    neither: list[str] = field(default_factory=list)
    quarantined: list[tuple[str, str]] = field(default_factory=list)

    def filtered_ids(self) -> list[str]:
        """The in-scope set: either domain or both."""
        return sorted(self.fm_only + self.robotics_only + self.both)

    def domain_ids(self, domain: str) -> list[str]:
        if domain == "foundation_model":
            return sorted(self.fm_only + self.both)
        if domain == "robotics":
            return sorted(self.robotics_only + self.both)
        raise ContractError(f"unknown domain {domain!r}")

    def check_covers(self, corpus_ids: list[str]) -> None:
        groups = [
            self.fm_only,
            self.robotics_only,
            self.both,
            self.neither,
            [pid for pid, _ in self.quarantined],
        ]
        seen: set[str] = set()
        for group in groups:
            for pid in group:
                if pid in seen:
                    raise ContractError(f"paper {pid} appears in two partitions")
                seen.add(pid)
        if seen != set(corpus_ids):
            raise ContractError("partition does not cover the corpus exactly")

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name in ("fm_only", "robotics_only", "both", "neither"):
            ids = getattr(self, name)
            (directory / f"{name}.txt").write_text(
                "\n".join(ids) + ("\n" if ids else "")
            )
        with open(directory / "quarantine.jsonl", "w", encoding="utf-8") as fh:
            for pid, reason in self.quarantined:
                fh.write(json.dumps({"paper_id": pid, "reason": reason}, sort_keys=True) + "\n")

    @classmethod
    def load(cls, directory: str | Path) -> "CorpusPartition":
        directory = Path(directory)
        part = cls()
        for name in ("fm_only", "robotics_only", "both", "neither"):
            text = (directory / f"{name}.txt").read_text()
            setattr(part, name, [line for line in text.splitlines() if line])
        qpath = directory / "quarantine.jsonl"
        if qpath.exists():
            for line in qpath.read_text().splitlines():
                if line.strip():
                    entry = json.loads(line)
                    part.quarantined.append((entry["paper_id"], entry["reason"]))
        return part


_LABEL_LIST = {
    DomainLabel.FOUNDATION_MODEL: "fm_only",
    DomainLabel.ROBOTICS: "robotics_only",
    DomainLabel.BOTH: "both",
    DomainLabel.NEITHER: "neither",
}


def filter_corpus(
    store: CorpusStore, defs: list[DomainDefinition], gateway: LlmGateway
) -> tuple[CorpusPartition, dict[str, str]]:
    """Classify every paper; returns the partition and the raw verdicts.

    Assembly is a single-threaded reduction ordered by paper id, so output
    is deterministic no matter how classification calls were scheduled.
    """
    partition = CorpusPartition()
    raw: dict[str, str] = {}
    for pid in sorted(store.ids()):
        paper = store.get(pid)
        try:
            verdict = classify_domain(paper, defs, gateway)
        except (ClassificationError, PreconditionError) as exc:
            partition.quarantined.append((pid, str(exc)))
            continue
        raw[pid] = verdict.raw_response
        getattr(partition, _LABEL_LIST[verdict.label]).append(pid)
    partition.check_covers(store.ids())
    return partition, raw
