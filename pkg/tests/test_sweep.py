"""Sweep tests: reuse equivalence, ordering, rendering round trips."""

import numpy as np
import pytest

from shiftexplain import (
    OTConfig,
    VectorShift,
    derive_k_seed,
    evaluate_map,
    make_shift_map,
    render_sweep,
    run_sweep,
    solve_ot,
    sweep_result_from_json,
)
from shiftexplain.sweep import CSV_HEADER

EXACT = OTConfig(solver="exact")


@pytest.fixture
def pair(rng):
    X = rng.normal(size=(40, 4))
    Y = rng.normal(size=(40, 4)) + np.array([3.0, 0.0, 1.0, 0.2])
    return X, Y


class TestRunSweep:
    def test_rows_sorted_unique_ascending(self, pair):
        res = run_sweep(*pair, "k_sparse_mean", [3, 1, 2], ot_config=EXACT)
        assert [row.k for row in res.rows] == [1, 2, 3]

    def test_duplicate_k_rejected(self, pair):
        with pytest.raises(ValueError, match="duplicates"):
            run_sweep(*pair, "k_sparse_mean", [1, 1], ot_config=EXACT)

    def test_k_out_of_range_names_the_bound(self, pair):
        with pytest.raises(ValueError, match=r"between 1 and 4 \(features\)"):
            run_sweep(*pair, "k_sparse_mean", [1, 5], ot_config=EXACT)

    def test_row_matches_direct_fit(self, pair):
        X, Y = pair
        res = run_sweep(X, Y, "k_sparse_ot", [1, 2, 3], ot_config=EXACT, random_state=3)
        sol = solve_ot(X, Y, EXACT, with_images=True)
        for k in (1, 2, 3):
            direct = make_shift_map(
                "k_sparse_ot", k=k, ot_config=EXACT, random_state=derive_k_seed(3, k)
            ).fit(X, Y, ot_images=sol.images)
            report = evaluate_map(direct, X, Y, ot_config=EXACT, ot_images=sol.images, baseline=sol.cost)
            row = res.row_for(k)
            assert row.transport_cost == report.transport_cost
            assert row.distance_to_ot == report.distance_to_ot
            assert row.percent_explained == report.percent_explained

    def test_cluster_row_matches_direct_fit_with_derived_seed(self, pair):
        X, Y = pair
        res = run_sweep(X, Y, "k_cluster", [2], ot_config=EXACT, random_state=17, restarts=4)
        sol = solve_ot(X, Y, EXACT, with_images=True)
        direct = make_shift_map(
            "k_cluster", k=2, ot_config=EXACT, restarts=4, random_state=derive_k_seed(17, 2)
        ).fit(X, Y, ot_images=sol.images)
        report = evaluate_map(direct, X, Y, ot_config=EXACT, ot_images=sol.images, baseline=sol.cost)
        assert res.row_for(2).percent_explained == report.percent_explained

    def test_sparse_mean_at_full_k_equals_vector_shift(self, pair):
        X, Y = pair
        res = run_sweep(X, Y, "k_sparse_mean", [4], ot_config=EXACT)
        full = evaluate_map(VectorShift().fit(X, Y), X, Y, ot_config=EXACT)
        assert res.row_for(4).percent_explained == full.percent_explained

    def test_sparse_ot_distance_non_increasing(self, pair):
        res = run_sweep(*pair, "k_sparse_ot", [1, 2, 3, 4], ot_config=EXACT)
        dists = [row.distance_to_ot for row in res.rows]
        assert all(b <= a for a, b in zip(dists, dists[1:]))
        assert dists[-1] == 0.0

    def test_per_k_failure_recorded_without_aborting(self):
        # Clustering cannot fill 3 clusters from 2 distinct joint rows, but
        # the k=1 row must still come back.
        X = np.vstack([np.zeros((4, 2)), np.ones((4, 2))])
        Y = X + 2.0
        res = run_sweep(X, Y, "k_cluster", [1, 3], ot_config=EXACT, restarts=2)
        assert res.row_for(1).error is None
        assert res.row_for(1).percent_explained == pytest.approx(100.0, abs=1e-9)
        assert "restarts" in res.row_for(3).error
        assert res.row_for(3).percent_explained is None

    def test_keep_maps(self, pair):
        res = run_sweep(*pair, "k_sparse_mean", [1, 2], ot_config=EXACT, keep_maps=True)
        assert len(res.maps) == 2
        assert res.maps[0]["variant"] == "k_sparse_mean"

    def test_vector_family_ignores_k(self, pair):
        res = run_sweep(*pair, "vector", [1], ot_config=EXACT)
        direct = evaluate_map(VectorShift().fit(*pair), *pair, ot_config=EXACT)
        assert res.row_for(1).percent_explained == direct.percent_explained

    def test_unknown_family(self, pair):
        with pytest.raises(ValueError, match="family"):
            run_sweep(*pair, "k_shiny", [1], ot_config=EXACT)


class TestRealAdultSweep:
    """Runs only when adult.data is present (see scripts/fetch_uci.py)."""

    def test_cluster_sweep_diminishing_returns_after_k4(self, adult_path):
        from shiftexplain import load_adult

        source, target = load_adult(adult_path)
        r = np.random.default_rng(0)
        sub_src = source.values[r.choice(source.n_rows, 500, replace=False)]
        sub_tgt = target.values[r.choice(target.n_rows, 500, replace=False)]
        res = run_sweep(
            sub_src, sub_tgt, "k_cluster", range(1, 9),
            ot_config=OTConfig(solver="auto"), random_state=0,
        )
        pe = {row.k: row.percent_explained for row in res.rows}
        gain_3_to_4 = pe[4] - pe[3]
        gain_4_to_5 = pe[5] - pe[4]
        assert gain_4_to_5 < gain_3_to_4


class TestDeriveKSeed:
    def test_distinct_per_k_and_stable(self):
        seeds = {k: derive_k_seed(7, k) for k in range(1, 6)}
        assert len(set(seeds.values())) == 5
        assert all(derive_k_seed(7, k) == s for k, s in seeds.items())  # idempotent

    def test_different_base_seeds_differ(self):
        assert derive_k_seed(1, 3) != derive_k_seed(2, 3)


class TestRenderSweep:
    @pytest.fixture
    def result(self, pair):
        return run_sweep(*pair, "k_sparse_mean", [1, 2, 3], ot_config=EXACT)

    def test_csv_schema(self, result):
        lines = render_sweep(result, "csv").splitlines()
        assert lines[0] == CSV_HEADER == (
            "k,family,transport_cost,distance_to_ot,percent_explained,wall_time_ms"
        )
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "1" and first[1] == "k_sparse_mean"
        assert float(first[5]) >= 0.0  # wall time present in csv

    def test_table_excludes_wall_time(self, result):
        table = render_sweep(result, "table")
        assert "wall_time" not in table
        assert len(table.splitlines()) == 4

    def test_json_round_trip(self, result):
        restored = sweep_result_from_json(render_sweep(result, "json"))
        assert restored.family == result.family
        assert restored.rows == result.rows
        assert restored.config == result.config

    def test_single_row_table(self, pair):
        res = run_sweep(*pair, "k_sparse_mean", [2], ot_config=EXACT)
        assert len(render_sweep(res, "table").splitlines()) == 2

    def test_empty_render_rejected(self, result):
        result.rows = []
        with pytest.raises(ValueError, match="empty"):
            render_sweep(result, "table")

    def test_unknown_format_rejected(self, result):
        with pytest.raises(ValueError, match="format"):
            render_sweep(result, "yaml")

    def test_error_rows_render_everywhere(self):
        X = np.vstack([np.zeros((4, 2)), np.ones((4, 2))])
        res = run_sweep(X, X + 2.0, "k_cluster", [1, 3], ot_config=EXACT, restarts=2)
        table = render_sweep(res, "table")
        assert "error" in table.splitlines()[0]
        csv_lines = render_sweep(res, "csv").splitlines()
        assert csv_lines[2].startswith("3,k_cluster,,,")
        restored = sweep_result_from_json(render_sweep(res, "json"))
        assert restored.row_for(3).error
