"""Camera-direction selection: the geodesic probe heuristic plus the
rule-based camera policies (fixed forward, random, swing, heuristic
follow).

The heuristic probes K points on a circle of radius r around the agent,
at angles 360*i/K (i = 1..K) from the navigation direction. A probe is
explorable when its map cell is still unexplored and its geodesic
distance (treating unexplored cells as navigable) stays below gamma;
among explorable probes the one closest to the current camera direction
wins, ties going to the smaller left turn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ang_dist, heading_vec, left_turn, normalize_deg, wrap180
from .mapping import UNEXPLORED, GlobalMap
from .planning import Navigability, geodesic_distance, make_navgrid
from .world import (AgentState, CameraAction, NavAction, NAV_ROTATION,
                    CAMERA_DELTA, TURN_STEP, camera_action_for_delta)

FOLLOW_TOLERANCE = 15.0   # degrees; hold the heading once this close
SWING_LIMIT = 90.0        # degrees; swing reverses at +-this offset


@dataclass(frozen=True)
class HeuristicConfig:
    k: int = 8
    radius: float = 2.4           # meters to each probe point
    gamma: float = 2.88           # explorable distance threshold, > radius

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.gamma > self.radius:
            raise ValueError("gamma must exceed the probe radius")


@dataclass
class HeuristicResult:
    points: list[tuple[float, float]]      # world positions of the K probes
    angles: list[float]                    # probe angles relative to nav direction
    distances: np.ndarray                  # geodesic meters; +inf if beyond gamma
    explorable: list[int]                  # indices (0-based) of explorable probes
    theta_star: float                      # degrees relative to nav direction
    chosen_index: int                      # probe index backing theta_star
    fallback: bool = field(default=False)  # True when no probe was explorable

    def theta_star_world(self, body_heading: float) -> float:
        return normalize_deg(body_heading + self.theta_star)


def probe_angles(k: int) -> list[float]:
    """Relative probe angles 360*i/k for i = 1..k; the last one is the
    navigation direction itself (360 == 0)."""
    return [360.0 * (i + 1) / k for i in range(k)]


def heuristic_direction(global_map: GlobalMap, state: AgentState,
                        cfg: HeuristicConfig = HeuristicConfig()) -> HeuristicResult:
    """Pick the explorable probe direction closest to the camera heading;
    fall back to the navigation direction when none qualifies."""
    grid = make_navgrid(global_map, Navigability.OPTIMISTIC)
    agent_cell = global_map.cell_index(*state.position)
    body = state.body_heading
    cam = state.camera_heading
    angles = probe_angles(cfg.k)
    # probes farther than gamma can never be explorable, so the geodesic
    # query is bounded just past the threshold
    limit = cfg.gamma + 2.0 * global_map.resolution

    points = []
    dists = np.full(cfg.k, np.inf)
    explorable = []
    for i, rel in enumerate(angles):
        ux, uy = heading_vec(normalize_deg(body + rel))
        p = (state.position[0] + cfg.radius * ux, state.position[1] + cfg.radius * uy)
        points.append(p)
        iy, ix = global_map.cell_index(*p)
        if not global_map.in_bounds(iy, ix):
            continue
        d = geodesic_distance(grid, agent_cell, (iy, ix), limit=limit)
        dists[i] = d
        if d < cfg.gamma and global_map.grid[iy, ix] == UNEXPLORED:
            explorable.append(i)

    if not explorable:
        zero_index = cfg.k - 1  # the probe at 360 == 0 degrees
        return HeuristicResult(points=points, angles=angles, distances=dists,
                               explorable=[], theta_star=0.0,
                               chosen_index=zero_index, fallback=True)

    def key(i):
        world = normalize_deg(body + angles[i])
        return ang_dist(world, cam), left_turn(cam, world)

    best = min(explorable, key=key)
    theta = angles[best]
    return HeuristicResult(points=points, angles=angles, distances=dists,
                           explorable=explorable,
                           theta_star=0.0 if theta == 360.0 else theta,
                           chosen_index=best)


def camera_fixed(state: AgentState, nav: NavAction) -> CameraAction:
    """Keep the camera locked forward: follow the body rotation when
    centered, otherwise re-center, preferring motor-free choices only
    among equally centered outcomes."""
    nav_delta = NAV_ROTATION[nav]
    offset = state.camera_offset

    def key(action):
        cam_delta = CAMERA_DELTA[action]
        residual = abs(wrap180(offset + cam_delta - nav_delta))
        actuated = cam_delta != nav_delta
        return residual, actuated, -cam_delta

    return min((CameraAction.TURN_CAMERA_LEFT, CameraAction.TURN_CAMERA_RIGHT,
                CameraAction.KEEP), key=key)


def camera_random(rng: np.random.Generator) -> CameraAction:
    """Uniform over the three camera actions."""
    return (CameraAction.TURN_CAMERA_LEFT, CameraAction.TURN_CAMERA_RIGHT,
            CameraAction.KEEP)[rng.integers(0, 3)]


def camera_swing(state: AgentState, phase: int, nav: NavAction) -> tuple[CameraAction, int]:
    """Sweep the camera offset across [-90, +90] in 30-degree steps,
    reversing at the extremes. Returns (action, next phase); phase is the
    sweep direction, +1 toward the left extreme."""
    nav_delta = NAV_ROTATION[nav]
    offset = wrap180(state.camera_offset)
    desired = offset + TURN_STEP * phase
    if desired > SWING_LIMIT or desired < -SWING_LIMIT:
        phase = -phase
        desired = offset + TURN_STEP * phase
    needed = desired - offset + nav_delta
    clipped = max(-TURN_STEP, min(TURN_STEP, needed))
    return camera_action_for_delta(clipped), phase


def camera_heuristic_follow(heur: HeuristicResult, state: AgentState) -> CameraAction:
    """Rotate the camera one absolute step toward the heuristic direction;
    hold once within the tolerance. An exact 180-degree tie turns left."""
    target = heur.theta_star_world(state.body_heading)
    err = wrap180(target - state.camera_heading)
    if abs(err) <= FOLLOW_TOLERANCE:
        return CameraAction.KEEP
    if err > 0:
        return CameraAction.TURN_CAMERA_LEFT
    return CameraAction.TURN_CAMERA_RIGHT
