"""Research-corpus analytics pipeline.

Turns a paper-metadata corpus into domain-filtered subsets, per-paper
structured extractions, an embedding index, topic clusters with keywords,
trend series, a cross-domain topology graph, structured survey tables, and
exact semantic retrieval, with a clustering-quality evaluation harness.
"""

__version__ = "0.1.0"
