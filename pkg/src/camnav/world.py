"""Ground-truth scene, agent kinematics, action execution, and the planar
depth raycaster that stands in for a forward RGB-D sensor.

The world grid is indexed ``occupied[iy, ix]`` with world x mapping to
columns and world y to rows; cell (iy, ix) covers the square
``[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from numba import njit

from .geometry import RESOLUTION, cell_of, euclid, heading_vec, normalize_deg

FORWARD_STEP = 0.25       # meters per FORWARD action
TURN_STEP = 30.0          # degrees per turn action (body and camera alike)
DEFAULT_GOAL_RADIUS = 1.5
DEFAULT_FOV_DEG = 79.0
DEFAULT_SENSOR_RANGE = 4.88
DEFAULT_N_RAYS = 160


class SceneError(ValueError):
    """Scene violates a structural invariant (open boundary, bad goal, ...)."""


class NavAction(Enum):
    FORWARD = "forward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    FOUND = "found"


class CameraAction(Enum):
    TURN_CAMERA_LEFT = "turn_camera_left"
    TURN_CAMERA_RIGHT = "turn_camera_right"
    KEEP = "keep"


# Body rotation per nav action and absolute camera-heading change per
# camera action, degrees CCW.
NAV_ROTATION = {
    NavAction.FORWARD: 0.0,
    NavAction.TURN_LEFT: TURN_STEP,
    NavAction.TURN_RIGHT: -TURN_STEP,
    NavAction.FOUND: 0.0,
}
CAMERA_DELTA = {
    CameraAction.TURN_CAMERA_LEFT: TURN_STEP,
    CameraAction.TURN_CAMERA_RIGHT: -TURN_STEP,
    CameraAction.KEEP: 0.0,
}

NAV_ACTIONS = (NavAction.FORWARD, NavAction.TURN_LEFT, NavAction.TURN_RIGHT, NavAction.FOUND)
CAMERA_ACTIONS = (CameraAction.TURN_CAMERA_LEFT, CameraAction.TURN_CAMERA_RIGHT, CameraAction.KEEP)


def camera_action_for_delta(delta: float) -> CameraAction:
    if delta > 0:
        return CameraAction.TURN_CAMERA_LEFT
    if delta < 0:
        return CameraAction.TURN_CAMERA_RIGHT
    return CameraAction.KEEP


@dataclass
class Scene:
    """Static ground-truth occupancy grid plus the ordered goal list."""

    occupied: np.ndarray                      # bool, shape (rows, cols)
    goal_positions: list[tuple[float, float]] = field(default_factory=list)
    resolution: float = RESOLUTION
    goal_radius: float = DEFAULT_GOAL_RADIUS
    scene_id: str = "scene"

    def __post_init__(self):
        self.occupied = np.asarray(self.occupied, dtype=bool)
        self.occupied.setflags(write=False)

    @property
    def height(self) -> int:
        return self.occupied.shape[0]

    @property
    def width(self) -> int:
        return self.occupied.shape[1]

    @property
    def extent(self) -> tuple[float, float]:
        """(width, height) in meters."""
        return self.width * self.resolution, self.height * self.resolution

    def in_bounds(self, iy: int, ix: int) -> bool:
        return 0 <= iy < self.height and 0 <= ix < self.width

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        return cell_of(y, self.resolution), cell_of(x, self.resolution)

    def is_free(self, x: float, y: float) -> bool:
        iy, ix = self.cell_index(x, y)
        return self.in_bounds(iy, ix) and not self.occupied[iy, ix]

    def free_cells(self) -> np.ndarray:
        """(n, 2) array of (iy, ix) free cell indices."""
        return np.argwhere(~self.occupied)

    def with_goals(self, goals: list[tuple[float, float]]) -> "Scene":
        return replace(self, goal_positions=[tuple(g) for g in goals])


def validate_scene(scene: Scene):
    """Raise SceneError unless the boundary is sealed, goals sit on free
    cells, and all goals are geodesically connected to each other."""
    occ = scene.occupied
    if occ.ndim != 2 or occ.shape[0] < 3 or occ.shape[1] < 3:
        raise SceneError("grid too small")
    if not (occ[0, :].all() and occ[-1, :].all() and occ[:, 0].all() and occ[:, -1].all()):
        raise SceneError("boundary cells must be occupied")
    if not scene.goal_positions:
        return
    from scipy import ndimage

    labels, _ = ndimage.label(~occ)  # 4-connectivity matches planner reachability
    goal_labels = []
    for gx, gy in scene.goal_positions:
        iy, ix = scene.cell_index(gx, gy)
        if not scene.in_bounds(iy, ix) or occ[iy, ix]:
            raise SceneError(f"goal ({gx}, {gy}) not on a free cell")
        goal_labels.append(labels[iy, ix])
    if len(set(goal_labels)) > 1:
        raise SceneError("goals are not geodesically connected")


@dataclass(frozen=True)
class AgentState:
    position: tuple[float, float]
    body_heading: float          # degrees, multiple of 30, in [0, 360)
    camera_offset: float = 0.0   # degrees, multiple of 30, in [0, 360)
    step: int = 0
    current_goal_index: int = 0

    @property
    def camera_heading(self) -> float:
        return normalize_deg(self.body_heading + self.camera_offset)


@dataclass(frozen=True)
class DepthScan:
    ray_angles: np.ndarray     # degrees relative to camera heading
    ray_distances: np.ndarray  # meters, clipped to max_range
    hit_flags: np.ndarray      # True where an obstacle terminated the ray
    max_range: float


@dataclass(frozen=True)
class StepOutcome:
    new_state: AgentState
    collided: bool
    motor_actuated: bool
    goal_advanced: bool


@njit(cache=True)
def _march_kernel(occupied, x, y, dx, dy, res, max_range):
    """Grid walk along one ray; returns (distance, hit_flag).

    Distance is to the first entered occupied-cell boundary, clipped to
    max_range. The starting cell is assumed free.
    """
    h, w = occupied.shape
    ix = int(math.floor(x / res + 1e-9))
    iy = int(math.floor(y / res + 1e-9))
    if dx > 0.0:
        step_x = 1
        t_max_x = ((ix + 1) * res - x) / dx
        t_delta_x = res / dx
    elif dx < 0.0:
        step_x = -1
        t_max_x = (ix * res - x) / dx
        t_delta_x = -res / dx
    else:
        step_x = 0
        t_max_x = np.inf
        t_delta_x = np.inf
    if dy > 0.0:
        step_y = 1
        t_max_y = ((iy + 1) * res - y) / dy
        t_delta_y = res / dy
    elif dy < 0.0:
        step_y = -1
        t_max_y = (iy * res - y) / dy
        t_delta_y = -res / dy
    else:
        step_y = 0
        t_max_y = np.inf
        t_delta_y = np.inf
    while True:
        if t_max_x < t_max_y:
            t = t_max_x
            ix += step_x
            t_max_x += t_delta_x
        else:
            t = t_max_y
            iy += step_y
            t_max_y += t_delta_y
        if t > max_range:
            return max_range, False
        if ix < 0 or ix >= w or iy < 0 or iy >= h:
            return max_range, False
        if occupied[iy, ix]:
            return t, True


def ray_march(scene: Scene, position: tuple[float, float], heading_deg: float,
              max_range: float) -> tuple[float, bool]:
    """Distance to the first occupied cell along a single ray."""
    dx, dy = heading_vec(heading_deg)
    return _march_kernel(scene.occupied, position[0], position[1], dx, dy,
                         scene.resolution, max_range)


def line_of_sight(scene: Scene, a: tuple[float, float], b: tuple[float, float]) -> bool:
    """True when the segment a->b crosses no occupied cell."""
    d = euclid(a, b)
    if d == 0.0:
        return True
    bearing = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0]))
    _, hit = ray_march(scene, a, bearing, d)
    return not hit


def ray_fan(fov_deg: float, n_rays: int) -> np.ndarray:
    """Relative ray angles spanning +-fov/2, degrees."""
    if n_rays <= 0:
        return np.zeros(0)
    if n_rays == 1:
        return np.zeros(1)
    return np.linspace(-fov_deg / 2.0, fov_deg / 2.0, n_rays)


def raycast(scene: Scene, position: tuple[float, float], camera_heading: float,
            fov: float = DEFAULT_FOV_DEG, max_range: float = DEFAULT_SENSOR_RANGE,
            n_rays: int = DEFAULT_N_RAYS) -> DepthScan:
    """Planar depth scan: one grid-walked ray per angle in the fan."""
    angles = ray_fan(fov, n_rays)
    dists = np.empty(angles.shape[0])
    hits = np.empty(angles.shape[0], dtype=bool)
    occ = scene.occupied
    x, y = position
    for i, rel in enumerate(angles):
        dx, dy = heading_vec(camera_heading + rel)
        dists[i], hits[i] = _march_kernel(occ, x, y, dx, dy, scene.resolution, max_range)
    return DepthScan(ray_angles=angles, ray_distances=dists, hit_flags=hits,
                     max_range=max_range)


def auto_found_check(scene: Scene, state: AgentState) -> bool:
    """True when the agent is within the goal radius of its current goal."""
    goal = scene.goal_positions[state.current_goal_index]
    return euclid(state.position, goal) <= scene.goal_radius


def step(scene: Scene, state: AgentState, nav: NavAction, cam: CameraAction) -> StepOutcome:
    """Execute one (navigation, camera) action pair.

    The camera action is an absolute-heading delta: the camera motor only
    actuates when that delta differs from the body rotation. A blocked
    FORWARD is a no-op with collided=True.
    """
    rotation = NAV_ROTATION[nav]
    cam_delta = CAMERA_DELTA[cam]
    x, y = state.position
    collided = False
    if nav is NavAction.FORWARD:
        _, hit = ray_march(scene, state.position, state.body_heading, FORWARD_STEP)
        if hit:
            collided = True
        else:
            hx, hy = heading_vec(state.body_heading)
            x += hx * FORWARD_STEP
            y += hy * FORWARD_STEP
    new_body = normalize_deg(state.body_heading + rotation)
    new_offset = normalize_deg(state.camera_offset + cam_delta - rotation)
    motor_actuated = cam_delta != rotation

    goal_advanced = False
    goal_index = state.current_goal_index
    if goal_index < len(scene.goal_positions) and euclid(
            (x, y), scene.goal_positions[goal_index]) <= scene.goal_radius:
        goal_advanced = True
        goal_index += 1

    new_state = AgentState(position=(x, y), body_heading=new_body,
                           camera_offset=new_offset, step=state.step + 1,
                           current_goal_index=goal_index)
    return StepOutcome(new_state=new_state, collided=collided,
                       motor_actuated=motor_actuated, goal_advanced=goal_advanced)


# ---------------------------------------------------------------------------
# Scene serialization: ASCII grid with a JSON header line, '#' occupied and
# '.' free; rows printed top-down (last text row is iy=0). A pure-JSON
# round-trip format is provided as well.
# ---------------------------------------------------------------------------

def scene_to_text(scene: Scene) -> str:
    header = json.dumps({
        "resolution": scene.resolution,
        "goal_positions": [list(g) for g in scene.goal_positions],
        "goal_radius": scene.goal_radius,
        "scene_id": scene.scene_id,
    })
    rows = []
    for iy in range(scene.height - 1, -1, -1):
        rows.append("".join("#" if c else "." for c in scene.occupied[iy]))
    return header + "\n" + "\n".join(rows) + "\n"


def scene_from_text(text: str) -> Scene:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SceneError("empty scene text")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise SceneError(f"bad scene header: {e}") from e
    rows = lines[1:]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SceneError("ragged scene rows")
    bad = set("".join(rows)) - {"#", "."}
    if bad:
        raise SceneError(f"unexpected grid characters: {sorted(bad)}")
    grid = np.array([[c == "#" for c in row] for row in reversed(rows)], dtype=bool)
    return Scene(
        occupied=grid,
        goal_positions=[tuple(g) for g in header.get("goal_positions", [])],
        resolution=float(header.get("resolution", RESOLUTION)),
        goal_radius=float(header.get("goal_radius", DEFAULT_GOAL_RADIUS)),
        scene_id=str(header.get("scene_id", "scene")),
    )


def scene_to_json(scene: Scene) -> str:
    return json.dumps({
        "resolution": scene.resolution,
        "goal_positions": [list(g) for g in scene.goal_positions],
        "goal_radius": scene.goal_radius,
        "scene_id": scene.scene_id,
        "rows": ["".join("#" if c else "." for c in scene.occupied[iy])
                 for iy in range(scene.height)],
    })


def scene_from_json(text: str) -> Scene:
    data = json.loads(text)
    grid = np.array([[c == "#" for c in row] for row in data["rows"]], dtype=bool)
    return Scene(
        occupied=grid,
        goal_positions=[tuple(g) for g in data.get("goal_positions", [])],
        resolution=float(data.get("resolution", RESOLUTION)),
        goal_radius=float(data.get("goal_radius", DEFAULT_GOAL_RADIUS)),
        scene_id=str(data.get("scene_id", "scene")),
    )


def save_scene(scene: Scene, path):
    with open(path, "w") as f:
        f.write(scene_to_text(scene))


def load_scene(path) -> Scene:
    with open(path) as f:
        return scene_from_text(f.read())
