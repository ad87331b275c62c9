"""Frontier-based navigation on the progressively built map: frontier
detection, target selection (sighted goal first, else nearest frontier),
and a bang-bang local controller that emits discrete navigation actions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import ndimage

from .geometry import cell_center, euclid, wrap180
from .mapping import FREE, UNEXPLORED, GlobalMap, ObjectMap
from .planning import Navigability, PathResult, astar, dijkstra_field, make_navgrid
from .world import AgentState, NavAction

MIN_CLUSTER_CELLS = 3        # raycast speckle filter
WAYPOINT_LOOKAHEAD = 0.3     # meters; steer at the first waypoint at least this far
HEADING_TOLERANCE = 15.0     # degrees; within this, drive forward

_EIGHT = np.ones((3, 3), dtype=int)


class TargetKind(Enum):
    GOAL = "goal"
    FRONTIER = "frontier"
    NONE = "none"


@dataclass
class Frontier:
    cells: list[tuple[int, int]]
    representative: tuple[int, int]     # member nearest the cluster centroid
    geodesic_dist: float = math.inf     # from the agent, filled at selection


@dataclass
class NavTarget:
    kind: TargetKind
    cell: tuple[int, int] | None = None
    path: PathResult | None = None


def frontier_mask(global_map: GlobalMap) -> np.ndarray:
    """Free cells with at least one 4-adjacent unexplored cell."""
    g = global_map.grid
    free = g == FREE
    unknown = g == UNEXPLORED
    near_unknown = np.zeros_like(unknown)
    near_unknown[1:, :] |= unknown[:-1, :]
    near_unknown[:-1, :] |= unknown[1:, :]
    near_unknown[:, 1:] |= unknown[:, :-1]
    near_unknown[:, :-1] |= unknown[:, 1:]
    return free & near_unknown


def detect_frontiers(global_map: GlobalMap,
                     min_cluster: int = MIN_CLUSTER_CELLS) -> list[Frontier]:
    """8-connected frontier clusters, speckle-filtered, in deterministic
    (lexicographic representative) order."""
    mask = frontier_mask(global_map)
    labels, n = ndimage.label(mask, structure=_EIGHT)
    frontiers = []
    for lab in range(1, n + 1):
        cells_arr = np.argwhere(labels == lab)
        if cells_arr.shape[0] < min_cluster:
            continue
        centroid = cells_arr.mean(axis=0)
        d2 = ((cells_arr - centroid) ** 2).sum(axis=1)
        best = np.lexsort((cells_arr[:, 1], cells_arr[:, 0], d2))[0]
        rep = (int(cells_arr[best, 0]), int(cells_arr[best, 1]))
        cells = [(int(r), int(c)) for r, c in cells_arr]
        frontiers.append(Frontier(cells=cells, representative=rep))
    frontiers.sort(key=lambda f: f.representative)
    return frontiers


def select_target(global_map: GlobalMap, objmap: ObjectMap,
                  state: AgentState) -> NavTarget:
    """Navigate to the current goal once sighted; otherwise to the nearest
    frontier by geodesic distance (ties to the lexicographically smaller
    representative); NONE when the map is exhausted."""
    grid = make_navgrid(global_map, Navigability.OPTIMISTIC)
    agent_cell = global_map.cell_index(*state.position)
    if state.current_goal_index in objmap.sightings:
        goal_cell = global_map.cell_index(*objmap.sightings[state.current_goal_index])
        path = astar(grid, agent_cell, goal_cell)
        return NavTarget(kind=TargetKind.GOAL, cell=goal_cell, path=path)
    frontiers = detect_frontiers(global_map)
    if not frontiers:
        return NavTarget(kind=TargetKind.NONE)
    field_dist = dijkstra_field(grid, agent_cell)
    for f in frontiers:
        f.geodesic_dist = float(field_dist[f.representative])
    reachable = [f for f in frontiers if math.isfinite(f.geodesic_dist)]
    if not reachable:
        return NavTarget(kind=TargetKind.NONE)
    best = min(reachable, key=lambda f: (f.geodesic_dist, f.representative))
    path = astar(grid, agent_cell, best.representative)
    return NavTarget(kind=TargetKind.FRONTIER, cell=best.representative, path=path)


def local_controller(state: AgentState, target: NavTarget,
                     resolution: float, origin: tuple[float, float] = (0.0, 0.0)) -> NavAction:
    """Steer toward the first waypoint at least WAYPOINT_LOOKAHEAD ahead:
    forward inside the heading tolerance, else turn toward it."""
    if target.kind is TargetKind.NONE or target.path is None or not target.path.waypoints:
        raise ValueError("local_controller needs a target with a path")
    wp_world = None
    for iy, ix in target.path.waypoints:
        p = (origin[0] + cell_center(ix, resolution), origin[1] + cell_center(iy, resolution))
        if euclid(state.position, p) >= WAYPOINT_LOOKAHEAD:
            wp_world = p
            break
    if wp_world is None:
        iy, ix = target.path.waypoints[-1]
        wp_world = (origin[0] + cell_center(ix, resolution),
                    origin[1] + cell_center(iy, resolution))
    bearing = math.degrees(math.atan2(wp_world[1] - state.position[1],
                                      wp_world[0] - state.position[0]))
    phi = wrap180(bearing - state.body_heading)
    if abs(phi) <= HEADING_TOLERANCE:
        return NavAction.FORWARD
    if phi > HEADING_TOLERANCE:
        return NavAction.TURN_LEFT
    return NavAction.TURN_RIGHT


def nav_policy_step(global_map: GlobalMap, objmap: ObjectMap,
                    state: AgentState) -> NavAction:
    """One decision of the mapping + frontier-exploration navigation
    policy; rotates in place when no target is available."""
    target = select_target(global_map, objmap, state)
    if (target.kind is TargetKind.NONE or target.path is None
            or not target.path.reachable or not target.path.waypoints):
        return NavAction.TURN_LEFT
    return local_controller(state, target, global_map.resolution, global_map.origin)
