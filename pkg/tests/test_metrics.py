import math

import numpy as np
import pytest

from camnav.metrics import (
    AggregateReport,
    EpisodeResult,
    MetricDomainError,
    aggregate,
    episode_metrics,
    oracle_path_length,
    ppl,
    spl,
)

from conftest import make_room
from oracles import dijkstra_reference


def result(success=1, progress=1.0, dbar=4.0, d=4.0, dprime=4.0, dbar_prime=4.0,
           steps=10):
    return EpisodeResult(success=success, progress=progress, agent_path_len=dbar,
                         oracle_len=d, found_prefix_oracle_len=dprime,
                         agent_len_at_last_found=dbar_prime, steps=steps)


# Ten hand-computed formula cases: (success, progress, dbar, d, dprime,
# dbar_prime, expected_spl, expected_ppl)
HAND_CASES = [
    (1, 1.0, 4.0, 4.0, 4.0, 4.0, 1.0, 1.0),
    (1, 1.0, 8.0, 4.0, 4.0, 8.0, 0.5, 0.5),
    (0, 0.0, 8.0, 4.0, 0.0, 0.0, 0.0, 0.0),
    (0, 2 / 3, 8.0, 4.0, 3.0, 6.0, 0.0, (2 / 3) * 0.5),
    (1, 1.0, 2.0, 4.0, 4.0, 2.0, 1.0, 1.0),          # beat the baseline: capped
    (0, 1 / 3, 10.0, 5.0, 2.0, 8.0, 0.0, (1 / 3) * 0.25),
    (1, 1.0, 5.0, 4.0, 4.0, 5.0, 0.8, 0.8),
    (0, 0.5, 7.0, 14.0, 7.0, 7.0, 0.0, 0.5),
    (0, 2 / 3, 12.0, 6.0, 4.0, 16.0, 0.0, (2 / 3) * 0.25),
    (1, 1.0, 16.0, 4.0, 4.0, 16.0, 0.25, 0.25),
]


class TestFormulas:
    def test_hand_cases_exact(self):
        for case in HAND_CASES:
            s, p, dbar, d, dpr, dbr, want_spl, want_ppl = case
            r = result(s, p, dbar, d, dpr, dbr)
            assert abs(spl(r) - want_spl) < 1e-12, case
            assert abs(ppl(r) - want_ppl) < 1e-12, case

    def test_spl_rejects_zero_oracle(self):
        with pytest.raises(MetricDomainError):
            spl(result(d=0.0))

    def test_ppl_zero_progress(self):
        assert ppl(result(success=0, progress=0.0, dprime=0.0, dbar_prime=3.0)) == 0.0

    def test_spl_bounded_by_success(self, rng):
        for _ in range(100):
            s = int(rng.integers(0, 2))
            dbar = float(rng.uniform(0.1, 20))
            d = float(rng.uniform(0.1, 20))
            r = result(s, float(s), dbar, d, d, dbar)
            assert spl(r) <= s + 1e-12
            assert ppl(r) <= r.progress + 1e-12


class TestOraclePathLength:
    def test_straight_corridor(self):
        scene = make_room(70, 10, goals=[(4.5, 0.4)])
        d = oracle_path_length(scene, (0.5, 0.4), scene.goal_positions)
        assert abs(d - 4.0) <= 0.08 + 1e-9

    def test_zero_goals(self):
        scene = make_room()
        assert oracle_path_length(scene, (1.0, 1.0), []) == 0.0

    def test_matches_dijkstra_sums(self, rng):
        scene = make_room(50, 50, walls=[(10, 40, 20, 22)])
        pts = []
        while len(pts) < 3:
            p = (float(rng.uniform(0.2, 3.8)), float(rng.uniform(0.2, 3.8)))
            if scene.is_free(*p):
                pts.append(p)
        start, goals = pts[0], pts[1:]
        got = oracle_path_length(scene, start, goals)
        want = 0.0
        prev = start
        for g in goals:
            field = dijkstra_reference(~scene.occupied, scene.cell_index(*prev))
            want += field[scene.cell_index(*g)]
            prev = g
        assert got == want

    def test_unreachable_goal_raises(self):
        scene = make_room(40, 40, walls=[(0, 40, 20, 22)],
                          goals=[(3.0, 1.0)])
        with pytest.raises(MetricDomainError):
            oracle_path_length(scene, (1.0, 1.0), scene.goal_positions)


class TestAggregate:
    def test_single_seed_zero_std(self):
        rep = aggregate({3: {"spl": 0.5, "success": 1.0}})
        assert rep.mean("spl") == 0.5
        assert rep.std("spl") == 0.0

    def test_duplicated_results_zero_std(self):
        rep = aggregate({0: {"spl": 0.7}, 1: {"spl": 0.7}, 2: {"spl": 0.7}})
        assert rep.mean("spl") == pytest.approx(0.7)
        assert rep.std("spl") == 0.0

    def test_hand_computed_three_values(self):
        rep = aggregate([{"m": 1.0}, {"m": 2.0}, {"m": 4.0}])
        assert rep.mean("m") == pytest.approx(7.0 / 3.0)
        # sample std: sqrt(((1-7/3)^2 + (2-7/3)^2 + (4-7/3)^2) / 2)
        want = math.sqrt(((1 - 7 / 3) ** 2 + (2 - 7 / 3) ** 2 + (4 - 7 / 3) ** 2) / 2)
        assert rep.std("m") == pytest.approx(want, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(MetricDomainError):
            aggregate([])


def test_episode_metrics_row():
    row = episode_metrics(result())
    assert set(row) == {"success", "progress", "spl", "ppl", "steps"}
    assert row["success"] == 1.0
