"""Trend kernel: OLS slope vs closed form, share/count invariants, report."""

import numpy as np
import pytest

from conftest import ols_slope_oracle
from rdr.clusterer import ClusterModel, ClusterSummary
from rdr.errors import ContractError
from rdr.trends import (
    DECLINING,
    FLAT,
    RISING,
    compute_trends,
    ols_slope,
    render_trend_svg,
    trend_report,
)


def model_from_assignments(assignments: dict[str, int], k: int) -> ClusterModel:
    return ClusterModel(
        k=k,
        centroids=np.zeros((k, 2)),
        assignments=assignments,
        inertia=0.0,
        seed=0,
        model_id="m",
    )


def spread(counts_per_cluster_year: dict[int, dict[int, int]]):
    """Materialize synthetic per-paper assignments/years from count tables."""
    assignments, years = {}, {}
    i = 0
    for cluster, by_year in counts_per_cluster_year.items():
        for year, count in by_year.items():
            for _ in range(count):
                pid = f"p{i:04d}"
                assignments[pid] = cluster
                years[pid] = year
                i += 1
    return assignments, years


class TestOlsSlope:
    def test_exact_line(self):
        assert ols_slope([1, 2, 3, 4, 5], [0.1, 0.2, 0.3, 0.4, 0.5]) == pytest.approx(
            0.1, abs=1e-15
        )

    def test_constant_series(self):
        assert ols_slope([2021, 2022, 2023], [0.2, 0.2, 0.2]) == 0.0

    def test_matches_closed_form_on_random_series(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 11))
            xs = list(range(2000, 2000 + n))
            ys = rng.normal(size=n).tolist()
            assert ols_slope(xs, ys) == pytest.approx(
                ols_slope_oracle(xs, ys), abs=1e-12
            )

    def test_single_point_contract_error(self):
        with pytest.raises(ContractError):
            ols_slope([2021], [1.0])


class TestComputeTrends:
    def test_constant_share_flat(self):
        # cluster 0 holds 1 of 5 papers every year: share 0.2, slope 0
        counts = {0: {y: 1 for y in range(2021, 2026)},
                  1: {y: 4 for y in range(2021, 2026)}}
        assignments, years = spread(counts)
        series = compute_trends(model_from_assignments(assignments, 2), years)
        s0 = series[0]
        assert s0.year_share == {y: pytest.approx(0.2) for y in range(2021, 2026)}
        assert s0.slope == pytest.approx(0.0, abs=1e-12)
        assert s0.momentum == FLAT

    def test_linear_shares_rising(self):
        # shares 0.1,0.2,0.3,0.4,0.5 against a 10-paper yearly corpus
        counts = {0: {2021 + i: 1 + i for i in range(5)},
                  1: {2021 + i: 9 - i for i in range(5)}}
        assignments, years = spread(counts)
        series = compute_trends(model_from_assignments(assignments, 2), years)
        assert series[0].slope == pytest.approx(0.1, abs=1e-12)
        assert series[0].momentum == RISING
        assert series[1].slope == pytest.approx(-0.1, abs=1e-12)
        assert series[1].momentum == DECLINING

    def test_single_cluster_count_slope(self):
        # counts 5,7,6,10,12: Sxy/Sxx = 17/10 = 1.7 per year
        counts = {0: dict(zip(range(2021, 2026), [5, 7, 6, 10, 12]))}
        assignments, years = spread(counts)
        series = compute_trends(model_from_assignments(assignments, 1), years)
        s = series[0]
        assert s.year_share == {y: 1.0 for y in range(2021, 2026)}
        assert s.count_slope == pytest.approx(1.7, abs=1e-12)
        assert s.momentum == RISING  # counts mode kicks in for k=1

    def test_single_year_degenerate_flat(self):
        counts = {0: {2024: 3}, 1: {2024: 2}}
        assignments, years = spread(counts)
        series = compute_trends(model_from_assignments(assignments, 2), years)
        assert all(s.degenerate and s.momentum == FLAT for s in series)

    def test_missing_year_contract_error(self):
        model = model_from_assignments({"a": 0}, 1)
        with pytest.raises(ContractError):
            compute_trends(model, {})

    def test_count_conservation_and_share_sum(self, rng):
        k = 4
        assignments = {f"p{i}": int(rng.integers(k)) for i in range(200)}
        years = {pid: int(rng.integers(2020, 2026)) for pid in assignments}
        series = compute_trends(model_from_assignments(assignments, k), years)
        span = sorted(series[0].year_counts)
        for y in span:
            total = sum(s.year_counts[y] for s in series)
            assert total == sum(1 for pid in years if years[pid] == y)
            if total > 0:
                assert sum(s.year_share[y] for s in series) == pytest.approx(1.0, abs=1e-9)

    def test_share_slope_invariant_under_corpus_scaling(self):
        counts = {0: {2021: 2, 2022: 3, 2023: 5},
                  1: {2021: 8, 2022: 7, 2023: 5}}
        doubled = {c: {y: 2 * v for y, v in by.items()} for c, by in counts.items()}
        a, ya = spread(counts)
        b, yb = spread(doubled)
        s1 = compute_trends(model_from_assignments(a, 2), ya)
        s2 = compute_trends(model_from_assignments(b, 2), yb)
        for x, y in zip(s1, s2):
            assert x.slope == pytest.approx(y.slope, abs=1e-12)

    def test_interior_gap_year_counts_zero(self):
        counts = {0: {2021: 2, 2023: 2}}  # nothing anywhere in 2022
        assignments, years = spread(counts)
        series = compute_trends(model_from_assignments(assignments, 1), years)
        assert series[0].year_counts[2022] == 0
        assert series[0].year_share[2022] == 0.0


def summaries_for(k):
    return [ClusterSummary(i, [f"kw{i}a", f"kw{i}b", f"kw{i}c"], []) for i in range(k)]


class TestTrendReport:
    def _series(self, k=2):
        counts = {c: {2021: 1 + c, 2022: 2 + c} for c in range(k)}
        assignments, years = spread(counts)
        return compute_trends(model_from_assignments(assignments, k), years)

    def test_two_panels_ordered(self):
        report = trend_report(self._series(2), summaries_for(2))
        assert [p["cluster_index"] for p in report["clusters"]] == [0, 1]
        assert report["clusters"][0]["keywords"] == ["kw0a", "kw0b", "kw0c"]

    def test_empty_series_contract_error(self):
        with pytest.raises(ContractError):
            trend_report([], summaries_for(0))

    def test_index_mismatch_contract_error(self):
        with pytest.raises(ContractError):
            trend_report(self._series(2), summaries_for(3))

    def test_report_is_deterministic(self):
        a = trend_report(self._series(2), summaries_for(2))
        b = trend_report(self._series(2), summaries_for(2))
        assert a == b

    def test_svg_renders(self):
        report = trend_report(self._series(2), summaries_for(2))
        svg = render_trend_svg(report["clusters"][0])
        assert svg.startswith("<svg") and "polyline" in svg
