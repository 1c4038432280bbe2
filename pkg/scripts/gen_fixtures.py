#!/usr/bin/env python3
"""Regenerate the 60-paper end-to-end fixture bundle.

Produces, under tests/fixtures/:
  corpus.jsonl            60 synthetic papers (18 FM, 12 robotics, 6 both, 24 neither)
  transcript.jsonl        replay transcript covering filter/extract/summaries/survey
  embedding_import.tsv    unit vectors (content hash + 8 floats) for every embedded text
  config.json             pipeline config wired to the files above
  golden_hashes.json      sha256 of the deterministic pipeline outputs

Everything is derived from fixed seeds; the golden hashes are recorded under
the numpy kernel backend (RDR_KERNELS=numpy), which is also how the
acceptance suite replays the run.
"""

import json
import os
import shutil
import sys
import tempfile
from pathlib import Path

os.environ["RDR_KERNELS"] = "numpy"  # must precede rdr imports

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from rdr import clusterer  # noqa: E402
from rdr.area_filter import build_classify_request, load_domain_definitions  # noqa: E402
from rdr.config import PipelineConfig  # noqa: E402
from rdr.corpus import CorpusStore, ingest_records  # noqa: E402
from rdr.embedding import VectorIndex, content_hash, paper_text  # noqa: E402
from rdr.manifest import file_hash  # noqa: E402
from rdr.perspectives import build_extraction_request, load_schemas  # noqa: E402
from rdr.pipeline import run_pipeline  # noqa: E402
from rdr.survey import build_survey_request  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

VENUE_CYCLE = {
    "fm": ["CVPR", "ICLR", "NeurIPS"],
    "rb": ["CoRL", "RSS"],
    "both": ["CoRL", "CVPR"],
    "no": ["ACL", "ICLR", "CVPR"],
}

# (group, count, title stem, abstract stem, topic center index)
GROUPS = [
    ("fm", 9, "Scaling vision language pretraining stage {i}",
     "We study large multimodal transformers aligning images and text for "
     "downstream transfer, instruction tuning, and benchmark evaluation {i}.", 0),
    ("fm", 9, "Accelerated diffusion synthesis variant {i}",
     "A generative diffusion backbone with efficient sampling, distillation, "
     "and controllable image generation at scale {i}.", 1),
    ("rb", 6, "Dexterous teleoperation dataset iteration {i}",
     "Low-cost open-source robot hands learn dexterous manipulation from "
     "human teleoperation demonstrations with tactile sensing {i}.", 2),
    ("rb", 6, "Legged locomotion controller revision {i}",
     "Reinforcement learning trains quadruped locomotion policies with "
     "sim-to-real transfer across rough terrain {i}.", 3),
    ("both", 6, "Vision language action policy build {i}",
     "A robot foundation model maps camera observations and language "
     "instructions to manipulation actions with a dexterous gripper {i}.", 4),
    ("no", 24, "Combinatorial structure theorem part {i}",
     "We prove a separation for depth-bounded circuits and derive extremal "
     "bounds unrelated to learning systems {i}.", 5),
]

# unit topic centers in d=8: the shared 'both' topic leans on both parents
D = 8


def topic_centers() -> np.ndarray:
    e = np.eye(D)
    centers = np.stack([e[0], e[1], e[2], e[3], (e[0] + e[2]) / np.sqrt(2.0), e[5]])
    return centers


def build_corpus_rows():
    rng = np.random.default_rng(42)
    rows = []
    truth = []  # (group, center_idx)
    i = 0
    for group, count, title_stem, abstract_stem, center in GROUPS:
        for j in range(count):
            venue = VENUE_CYCLE[group][j % len(VENUE_CYCLE[group])]
            year = 2021 + (i % 5)
            rows.append(
                {
                    "title": title_stem.format(i=j),
                    "authors": [f"Author {i % 7}", f"Author {97 - i}"],
                    "abstract": abstract_stem.format(i=j),
                    "venue": venue,
                    "year": year,
                    "pdf_url": None,
                    "citation_count": int(rng.integers(0, 300)) if i % 3 else None,
                }
            )
            truth.append((group, center))
            i += 1
    return rows, truth


def unit(v):
    return v / np.linalg.norm(v)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rows, truth = build_corpus_rows()
    corpus_path = FIXTURES / "corpus.jsonl"
    corpus_path.write_text("\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n")

    work = Path(tempfile.mkdtemp(prefix="rdr-fixture-"))
    ingest_records(corpus_path, "jsonl", work / "store")
    store = CorpusStore.open(work / "store")
    assert len(store) == 60, f"fixture corpus must have 60 unique papers, got {len(store)}"

    # ground truth keyed by paper id
    by_title = {}
    for row, (group, center) in zip(rows, truth):
        by_title[row["title"]] = (group, center)
    info = {}
    for pid in store.ids():
        rec = store.get(pid)
        info[pid] = by_title[rec.title]

    defs = load_domain_definitions()
    schemas = load_schemas()
    transcript = []

    def record(req, text):
        transcript.append(
            {
                "request_hash": __import__("rdr.llm_gateway", fromlist=["request_hash"])
                .request_hash(req),
                "model_tag": req.model_tag,
                "response_text": text,
                "tokens": {"input": len(req.user_text.split()), "output": len(text.split())},
            }
        )

    # 1. area-filter verdicts
    for pid in sorted(store.ids()):
        group, _ = info[pid]
        fm = "yes" if group in ("fm", "both") else "no"
        rb = "yes" if group in ("rb", "both") else "no"
        req = build_classify_request(store.get(pid), defs)
        record(req, json.dumps({"foundation_model": fm, "robotics": rb}))

    # 2. perspective extractions per schema
    fm_fields = [
        "images and text tokens {i}",
        "a multimodal transformer backbone {i}",
        "aligned captions and labels {i}",
        "contrastive and autoregressive objectives {i}",
        "two-stage pretrain finetune recipe {i}",
    ]
    rb_fields = [
        "RGB wrist camera and joint encoders {i}",
        "a two-finger or dexterous hand platform {i}",
        "joint torque commands {i}",
        "end-effector deltas and gripper actions {i}",
        "tabletop and household scenes {i}",
    ]
    for pid in sorted(store.ids()):
        group, _ = info[pid]
        rec = store.get(pid)
        if group in ("fm", "both"):
            req = build_extraction_request(rec, schemas["foundation_model"])
            doc = {f"perspective {k+1}": fm_fields[k].format(i=pid[:4]) for k in range(5)}
            record(req, json.dumps(doc))
        if group in ("rb", "both"):
            req = build_extraction_request(rec, schemas["robotics"])
            doc = {f"perspective {k+1}": rb_fields[k].format(i=pid[:4]) for k in range(5)}
            record(req, json.dumps(doc))

    # 3. embedding import: one unit vector per embedded text
    centers = topic_centers()
    rng = np.random.default_rng(7)
    import_lines = []
    vectors = {}  # paper id -> vector
    for pid in sorted(store.ids()):
        _, center = info[pid]
        vec = unit(centers[center] + 0.12 * rng.normal(size=D))
        vectors[pid] = vec
        text = paper_text(store.get(pid).title, store.get(pid).abstract)
        import_lines.append(
            content_hash(text) + " " + " ".join(f"{x:.10f}" for x in vec)
        )
    query_text = "dexterous manipulation"
    import_lines.append(
        content_hash(query_text) + " "
        + " ".join(f"{x:.10f}" for x in unit(centers[2] + 0.05 * rng.normal(size=D)))
    )

    # 4. discover the cluster composition the pipeline will see, then script
    #    keyword summaries and the survey for each domain
    domain_members = {
        "robotics": sorted(pid for pid, (g, _) in info.items() if g in ("rb", "both")),
        "foundation_model": sorted(pid for pid, (g, _) in info.items() if g in ("fm", "both")),
    }
    keyword_bank = {
        ("robotics", 2): "teleoperation, dexterous manipulation, open-source robotics",
        ("robotics", 4): "teleoperation, dexterous manipulation, open-source robotics",
        ("robotics", 3): "legged locomotion, reinforcement learning, sim-to-real transfer",
        ("foundation_model", 0): "vision-language models, multimodal pretraining, instruction tuning",
        ("foundation_model", 4): "vision-language models, multimodal pretraining, instruction tuning",
        ("foundation_model", 1): "diffusion models, image generation, efficient sampling",
    }
    survey_rows = {
        "robotics": [
            ("Dexterous manipulation systems",
             "Teleoperated and learned dexterous hand control with low-cost hardware",
             ["teleoperation rigs", "dexterous hands"]),
            ("Locomotion control",
             "Learned quadruped locomotion with simulation-to-reality transfer",
             ["quadruped controllers", "terrain curricula"]),
        ],
        "foundation_model": [
            ("Multimodal pretraining",
             "Large vision-language backbones and instruction tuning",
             ["vision-language models", "instruction tuning"]),
            ("Generative diffusion",
             "Diffusion-based synthesis and efficient sampling",
             ["diffusion backbones", "fast samplers"]),
        ],
    }

    seed = 0
    for domain in ("robotics", "foundation_model"):
        ids = domain_members[domain]
        texts = {
            pid: paper_text(store.get(pid).title, store.get(pid).abstract) for pid in ids
        }
        index = VectorIndex(
            ids=ids,
            matrix=np.array([vectors[pid] for pid in ids]),
            model_id="nvidia/NV-Embed-v2",
        )
        model = clusterer.kmeans(index, 2, seed)
        summaries = []
        for c in range(model.k):
            members = model.members(c)
            dominant = max(
                set(info[pid][1] for pid in members),
                key=lambda ctr: sum(1 for p in members if info[p][1] == ctr),
            )
            keywords = keyword_bank[(domain, dominant)]
            req, sample = clusterer.build_summary_request(model, c, texts, seed + c)
            record(req, keywords)
            summaries.append(
                clusterer.ClusterSummary(c, [k.strip() for k in keywords.split(",")], sample)
            )
        # survey structuring response: map each scripted row onto the cluster
        # whose dominant topic it describes, covering all cluster ids
        row_for_cluster = {}
        for c in range(model.k):
            members = model.members(c)
            dominant = max(
                set(info[pid][1] for pid in members),
                key=lambda ctr: sum(1 for p in members if info[p][1] == ctr),
            )
            # robotics: center 2/4 -> row 0, center 3 -> row 1
            # fm: center 0/4 -> row 0, center 1 -> row 1
            first = dominant in (2, 4) if domain == "robotics" else dominant in (0, 4)
            row_for_cluster[c] = 0 if first else 1
        categories = []
        for r_idx, (sub_title, covered, examples) in enumerate(survey_rows[domain]):
            cluster_ids = sorted(c for c, r in row_for_cluster.items() if r == r_idx)
            if not cluster_ids:
                continue
            categories.append(
                {
                    "sub_title": sub_title,
                    "what_is_covered": covered,
                    "typical_examples": examples,
                    "cluster_ids": cluster_ids,
                }
            )
        survey_doc = {
            "categories": [
                {"title": f"{domain} research landscape", "sub_rows": categories}
            ]
        }
        req = build_survey_request(summaries)
        record(req, json.dumps(survey_doc))
        # survey citation rows get embedded: add their vectors to the import
        for sub in categories:
            row_text = f"{sub['sub_title']}\n\n{sub['what_is_covered']}"
            anchor = centers[2 if domain == "robotics" else 0]
            if sub is not categories[0]:
                anchor = centers[3 if domain == "robotics" else 1]
            vec = unit(anchor + 0.05 * rng.normal(size=D))
            import_lines.append(
                content_hash(row_text) + " " + " ".join(f"{x:.10f}" for x in vec)
            )

    (FIXTURES / "transcript.jsonl").write_text(
        "\n".join(json.dumps(e, sort_keys=True, ensure_ascii=False) for e in transcript) + "\n"
    )
    (FIXTURES / "embedding_import.tsv").write_text("\n".join(import_lines) + "\n")

    config_doc = {
        "run_dir": "run",
        "corpus.source": "corpus.jsonl",
        "corpus.format": "jsonl",
        "domains": ["robotics", "foundation_model"],
        "embedding.import": "embedding_import.tsv",
        "embedding.mode": "general",
        "cluster.k_overrides": {"robotics": 2, "foundation_model": 2},
        "trends.threshold": 0.005,
        "graph.tau": 0.55,
        "llm.provider": "replay",
        "llm.transcript": "transcript.jsonl",
        "seed": 0,
    }
    (FIXTURES / "config.json").write_text(json.dumps(config_doc, indent=2) + "\n")

    # 5. run the pipeline and freeze golden hashes of the deterministic outputs
    run_dir = work / "run"
    cfg = PipelineConfig.load(FIXTURES / "config.json")
    cfg.run_dir = str(run_dir)
    run_pipeline(cfg)

    golden = {}
    for rel in sorted(_golden_files(run_dir)):
        golden[rel] = file_hash(run_dir / rel)
    (FIXTURES / "golden_hashes.json").write_text(
        json.dumps(golden, sort_keys=True, indent=2) + "\n"
    )
    shutil.rmtree(work)
    print(f"fixtures written to {FIXTURES} ({len(transcript)} transcript entries, "
          f"{len(golden)} golden files)")


def _golden_files(run_dir: Path):
    """The byte-stable outputs named by the determinism contract."""
    rels = []
    for name in ("fm_only.txt", "robotics_only.txt", "both.txt", "neither.txt"):
        rels.append(f"filter/{name}")
    for domain in ("robotics", "foundation_model"):
        for name in ("model.json", "centroids.f64", "assignments.tsv",
                     "summaries.json", "points.json"):
            rels.append(f"cluster/{domain}/{name}")
        rels.append(f"trends/{domain}/report.json")
        rels.append(f"survey/{domain}/survey.json")
        rels.append(f"survey/{domain}/survey.txt")
        rels.append(f"survey/{domain}/survey.html")
    rels.append("graph/graph.json")
    rels.append("graph/edges.tsv")
    return [r for r in rels if (run_dir / r).exists()]


if __name__ == "__main__":
    main()
