"""Per-cluster momentum: yearly counts, corpus shares, and an OLS slope.

Shares are scale-free across venue growth, so the Rising/Flat/Declining
label comes from the share slope against a symmetric threshold. Counts are
exported alongside (and drive the label when the model has a single cluster,
where shares are constant by construction).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .clusterer import ClusterModel, ClusterSummary
from .errors import ContractError

DEFAULT_SLOPE_THRESHOLD = 0.005  # share per year

RISING = "Rising"
FLAT = "Flat"
DECLINING = "Declining"


@dataclass
class TrendSeries:
    cluster_index: int
    year_counts: dict[int, int]
    year_share: dict[int, float]
    slope: float
    count_slope: float
    momentum: str
    degenerate: bool = False


def ols_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope Sxy/Sxx; contract error on < 2 distinct x."""
    if len(xs) != len(ys):
        raise ContractError("x and y lengths differ")
    n = len(xs)
    if n < 2 or len(set(xs)) < 2:
        raise ContractError("slope needs at least two distinct x values")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


def _momentum(slope: float, threshold: float) -> str:
    if slope >= threshold:
        return RISING
    if slope <= -threshold:
        return DECLINING
    return FLAT


def compute_trends(
    model: ClusterModel,
    years: dict[str, int],
    threshold: float = DEFAULT_SLOPE_THRESHOLD,
) -> list[TrendSeries]:
    """Counts, shares, slopes, and momentum per cluster over the year span.

    Missing (cluster, year) cells count as zero. A single observed year has
    no defined slope: the series is flagged degenerate and labeled Flat.
    """
    missing = [pid for pid in model.assignments if pid not in years]
    if missing:
        raise ContractError(f"{len(missing)} assigned papers have no year (e.g. {missing[0]})")

    observed = sorted({years[pid] for pid in model.assignments})
    span = list(range(observed[0], observed[-1] + 1))
    totals = {y: 0 for y in span}
    counts = {c: {y: 0 for y in span} for c in range(model.k)}
    for pid, c in model.assignments.items():
        y = years[pid]
        totals[y] += 1
        counts[c][y] += 1

    single_year = len(observed) < 2
    series = []
    for c in range(model.k):
        shares = {
            y: (counts[c][y] / totals[y] if totals[y] > 0 else 0.0) for y in span
        }
        if single_year:
            slope = 0.0
            count_slope = 0.0
        else:
            xs = [float(y) for y in span]
            slope = ols_slope(xs, [shares[y] for y in span])
            count_slope = ols_slope(xs, [float(counts[c][y]) for y in span])
        # a single-cluster model has constant shares; counts carry the signal
        basis = count_slope if model.k == 1 else slope
        series.append(
            TrendSeries(
                cluster_index=c,
                year_counts=dict(counts[c]),
                year_share=shares,
                slope=slope,
                count_slope=count_slope,
                momentum=FLAT if single_year else _momentum(basis, threshold),
                degenerate=single_year,
            )
        )
    return series


def trend_report(
    series: list[TrendSeries],
    summaries: Sequence[ClusterSummary],
    threshold: float = DEFAULT_SLOPE_THRESHOLD,
) -> dict:
    """Per-cluster panels, ordered by cluster index, as one JSON-able document."""
    if not series:
        raise ContractError("no trend series to report")
    series_idx = {s.cluster_index for s in series}
    summary_idx = {s.cluster_index for s in summaries}
    if series_idx != summary_idx:
        raise ContractError(
            f"cluster indexes differ: series {sorted(series_idx)} vs "
            f"summaries {sorted(summary_idx)}"
        )
    keywords = {s.cluster_index: s.keywords for s in summaries}
    panels = []
    for s in sorted(series, key=lambda s: s.cluster_index):
        years = sorted(s.year_counts)
        panels.append(
            {
                "cluster_index": s.cluster_index,
                "keywords": keywords[s.cluster_index],
                "years": years,
                "counts": [s.year_counts[y] for y in years],
                "shares": [s.year_share[y] for y in years],
                "slope": s.slope,
                "count_slope": s.count_slope,
                "momentum": s.momentum,
                "degenerate": s.degenerate,
            }
        )
    return {"threshold": threshold, "clusters": panels}


def save_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def render_trend_svg(panel: dict, width: int = 480, height: int = 280) -> str:
    """One deterministic SVG line chart (shares and counts) for a cluster panel."""
    years = panel["years"]
    shares = panel["shares"]
    margin = 40
    inner_w = width - 2 * margin
    inner_h = height - 2 * margin
    y_max = max(shares) if max(shares) > 0 else 1.0

    def sx(i: int) -> float:
        return margin + (inner_w * i / max(1, len(years) - 1))

    def sy(v: float) -> float:
        return height - margin - inner_h * (v / y_max)

    points = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in enumerate(shares))
    labels = "".join(
        f'<text x="{sx(i):.2f}" y="{height - margin + 16}" font-size="10" '
        f'text-anchor="middle">{y}</text>'
        for i, y in enumerate(years)
    )
    title = " / ".join(panel["keywords"])
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<text x="{margin}" y="20" font-size="12">'
        f'{panel["cluster_index"]}. {title} [{panel["momentum"]}]</text>'
        f'<polyline fill="none" stroke="#2a6f97" stroke-width="2" points="{points}"/>'
        f"{labels}"
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="#333"/>'
        "</svg>\n"
    )
