"""Episode scoring: Success, Progress, and their path-length-weighted
variants, plus the ground-truth shortest-path baseline and multi-seed
aggregation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .planning import astar, navgrid_from_scene
from .world import Scene


class MetricDomainError(ValueError):
    pass


@dataclass
class EpisodeResult:
    success: int                       # 1 iff every goal was reached in order
    progress: float                    # fraction of goals reached
    agent_path_len: float              # meters actually driven
    oracle_len: float                  # shortest start -> goals-in-order length
    found_prefix_oracle_len: float     # oracle length over the found prefix
    agent_len_at_last_found: float     # driven meters when the last goal fell
    steps: int
    explored_area_curve: list[tuple[int, float]] = field(default_factory=list)
    found_all_step: int | None = None
    sighted_all_step: int | None = None   # all goals on the object map


def spl(result: EpisodeResult) -> float:
    """Success weighted by path length: s * d / max(d, d_agent)."""
    d = result.oracle_len
    if d <= 0:
        raise MetricDomainError("oracle path length must be positive")
    return result.success * d / max(d, result.agent_path_len)


def ppl(result: EpisodeResult) -> float:
    """Progress weighted by path length over the found prefix."""
    p = result.progress
    if p == 0:
        return 0.0
    d = result.found_prefix_oracle_len
    denom = max(d, result.agent_len_at_last_found)
    if denom == 0:
        return p
    return p * d / denom


def oracle_path_length(scene: Scene, start: tuple[float, float],
                       goals: list[tuple[float, float]]) -> float:
    """Shortest geodesic length visiting the goals in order on the
    ground-truth grid."""
    grid = navgrid_from_scene(scene)
    total = 0.0
    prev = start
    for goal in goals:
        res = astar(grid, scene.cell_index(*prev), scene.cell_index(*goal))
        if not res.reachable:
            raise MetricDomainError(f"goal {goal} unreachable from {prev}")
        total += res.distance
        prev = goal
    return total


@dataclass
class AggregateReport:
    """Per-metric mean and sample standard deviation across seeds."""

    stats: dict[str, tuple[float, float]]

    def mean(self, metric: str) -> float:
        return self.stats[metric][0]

    def std(self, metric: str) -> float:
        return self.stats[metric][1]


def aggregate(results_by_seed) -> AggregateReport:
    """Aggregate {seed: {metric: value}} (or a list of metric dicts)."""
    if isinstance(results_by_seed, dict):
        rows = [results_by_seed[k] for k in sorted(results_by_seed)]
    else:
        rows = list(results_by_seed)
    if not rows:
        raise MetricDomainError("need at least one seed")
    metrics = rows[0].keys()
    stats = {}
    for m in metrics:
        vals = np.array([row[m] for row in rows], dtype=float)
        mean = float(vals.mean())
        std = 0.0 if vals.size == 1 else float(vals.std(ddof=1))
        stats[m] = (mean, std)
    return AggregateReport(stats=stats)


def episode_metrics(result: EpisodeResult) -> dict[str, float]:
    """The standard scoring row for one episode."""
    return {
        "success": float(result.success),
        "progress": result.progress,
        "spl": spl(result),
        "ppl": ppl(result),
        "steps": float(result.steps),
    }
