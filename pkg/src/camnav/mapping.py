"""Occupancy mapping: local scan rasterization, registration into the
global map, egocentric crops, and the goal-sighting map.

Maps are three-valued uint8 rasters: 0 unexplored, 1 free, 2 occupied.
Sensor-frame rasters (local and egocentric) use +row = forward and
+col = right of the heading; the agent sits at the bottom-center of a
local map and at the center cell of an egocentric crop.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import RESOLUTION, cell_of, heading_vec
from .world import DepthScan, Scene, AgentState, ray_march

UNEXPLORED = 0
FREE = 1
OCCUPIED = 2

LOCAL_SIZE = 61     # cells per side; 61 * 0.08 = 4.88 m ahead of the camera
EGO_SIZE = 125      # cells per side, agent at the center cell
GLOBAL_MARGIN = 1.0  # meters of padding around the scene


class OutOfBoundsError(RuntimeError):
    """Observed content fell outside the global raster; the scene margin
    or map sizing is misconfigured."""


@dataclass
class LocalMap:
    grid: np.ndarray   # uint8 (LOCAL_SIZE, LOCAL_SIZE)
    resolution: float = RESOLUTION


@dataclass
class EgoMap:
    grid: np.ndarray   # uint8 (EGO_SIZE, EGO_SIZE)
    resolution: float = RESOLUTION


@dataclass
class GlobalMap:
    grid: np.ndarray                 # uint8 (rows, cols)
    origin: tuple[float, float]      # world coords of the grid[0, 0] corner
    resolution: float = RESOLUTION
    explored_cells: int = 0

    @classmethod
    def for_scene(cls, scene: Scene, margin: float = GLOBAL_MARGIN) -> "GlobalMap":
        res = scene.resolution
        pad = int(math.ceil(margin / res))
        shape = (scene.height + 2 * pad, scene.width + 2 * pad)
        return cls(grid=np.zeros(shape, dtype=np.uint8),
                   origin=(-pad * res, -pad * res), resolution=res)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        return (cell_of(y - self.origin[1], self.resolution),
                cell_of(x - self.origin[0], self.resolution))

    def in_bounds(self, iy: int, ix: int) -> bool:
        return 0 <= iy < self.grid.shape[0] and 0 <= ix < self.grid.shape[1]

    def value_at(self, x: float, y: float) -> int:
        iy, ix = self.cell_index(x, y)
        if not self.in_bounds(iy, ix):
            return UNEXPLORED
        return int(self.grid[iy, ix])

    def explored_area_m2(self) -> float:
        return self.explored_cells * self.resolution * self.resolution

    def copy(self) -> "GlobalMap":
        return GlobalMap(grid=self.grid.copy(), origin=self.origin,
                         resolution=self.resolution, explored_cells=self.explored_cells)


@dataclass
class ObjectMap:
    """Goal sightings: goal index -> ground-truth world position, recorded
    the first time the goal enters the camera's unobstructed field of view.
    Entries are never removed."""

    sightings: dict[int, tuple[float, float]] = field(default_factory=dict)

    def __contains__(self, goal_index: int) -> bool:
        return goal_index in self.sightings


def _sample_cells(f: np.ndarray, w: np.ndarray, res: float) -> tuple[np.ndarray, np.ndarray]:
    """Sensor-frame coords -> local map cells (+row forward, +col right)."""
    rows = np.floor(f / res + 1e-9).astype(np.int64)
    cols = (LOCAL_SIZE // 2) + np.floor(w / res + 0.5 + 1e-9).astype(np.int64)
    return rows, cols


def build_local_map(scan: DepthScan, res: float = RESOLUTION) -> LocalMap:
    """Rasterize a depth scan: cells a ray passes through become free,
    cells a ray terminates in become occupied."""
    grid = np.zeros((LOCAL_SIZE, LOCAL_SIZE), dtype=np.uint8)
    n = scan.ray_angles.shape[0]
    if n == 0:
        return LocalMap(grid=grid, resolution=res)
    rel = np.radians(scan.ray_angles)
    cos_r = np.cos(rel)
    sin_r = np.sin(rel)
    ds = res / 2.0
    # free cells: dense samples strictly before each ray's endpoint
    f_parts = []
    w_parts = []
    for i in range(n):
        ts = np.arange(ds / 2.0, scan.ray_distances[i], ds)
        f_parts.append(ts * cos_r[i])
        w_parts.append(ts * -sin_r[i])
    f = np.concatenate(f_parts)
    w = np.concatenate(w_parts)
    rows, cols = _sample_cells(f, w, res)
    ok = (rows >= 0) & (rows < LOCAL_SIZE) & (cols >= 0) & (cols < LOCAL_SIZE)
    grid[rows[ok], cols[ok]] = FREE
    # hit cells: nudge just past the boundary the ray stopped on
    hit = scan.hit_flags
    if hit.any():
        t_hit = scan.ray_distances[hit] + 1e-6
        fh = t_hit * cos_r[hit]
        wh = t_hit * -sin_r[hit]
        rows, cols = _sample_cells(fh, wh, res)
        ok = (rows >= 0) & (rows < LOCAL_SIZE) & (cols >= 0) & (cols < LOCAL_SIZE)
        grid[rows[ok], cols[ok]] = OCCUPIED
    return LocalMap(grid=grid, resolution=res)


def register(local: LocalMap, global_map: GlobalMap,
             position: tuple[float, float], camera_heading: float) -> GlobalMap:
    """Merge a local map into the global map at the camera pose.

    Each global cell inside the local footprint pulls the nearest local
    cell through the inverse rigid transform; the new value is the
    elementwise max of old and observed, so occupancy never downgrades.
    Raises OutOfBoundsError if observed (nonzero) content falls off the
    raster.
    """
    res = global_map.resolution
    ux, uy = heading_vec(camera_heading)
    # right-hand lateral axis of the camera frame
    vx, vy = uy, -ux
    px, py = position

    half = LOCAL_SIZE // 2
    corners_f = np.array([0.0, 0.0, LOCAL_SIZE * res, LOCAL_SIZE * res])
    corners_w = np.array([-(half + 0.5) * res, (half + 0.5) * res,
                          -(half + 0.5) * res, (half + 0.5) * res])
    cx = px + corners_f * ux + corners_w * vx
    cy = py + corners_f * uy + corners_w * vy

    oy, ox = global_map.origin[1], global_map.origin[0]
    lo_iy = cell_of(cy.min() - oy, res)
    hi_iy = cell_of(cy.max() - oy, res)
    lo_ix = cell_of(cx.min() - ox, res)
    hi_ix = cell_of(cx.max() - ox, res)

    h, w = global_map.shape
    iy0, iy1 = max(lo_iy, 0), min(hi_iy, h - 1)
    ix0, ix1 = max(lo_ix, 0), min(hi_ix, w - 1)
    if iy0 > iy1 or ix0 > ix1:
        if local.grid.any():
            raise OutOfBoundsError("local map footprint entirely off the raster")
        return global_map

    iys, ixs = np.meshgrid(np.arange(iy0, iy1 + 1), np.arange(ix0, ix1 + 1), indexing="ij")
    gx = ox + (ixs + 0.5) * res - px
    gy = oy + (iys + 0.5) * res - py
    f = gx * ux + gy * uy
    wlat = gx * vx + gy * vy
    rows, cols = _sample_cells(f, wlat, res)
    ok = (rows >= 0) & (rows < LOCAL_SIZE) & (cols >= 0) & (cols < LOCAL_SIZE)
    vals = np.zeros(rows.shape, dtype=np.uint8)
    vals[ok] = local.grid[rows[ok], cols[ok]]

    window = global_map.grid[iy0:iy1 + 1, ix0:ix1 + 1]
    newly = int(((window == UNEXPLORED) & (vals > 0)).sum())
    np.maximum(window, vals, out=window)
    global_map.explored_cells += newly

    _check_information_loss(local, global_map, px, py, ux, uy, vx, vy)
    return global_map


def _check_information_loss(local, global_map, px, py, ux, uy, vx, vy):
    """Nonzero local cells must land inside the global raster."""
    nz = np.argwhere(local.grid > 0)
    if nz.size == 0:
        return
    res = global_map.resolution
    half = LOCAL_SIZE // 2
    f = (nz[:, 0] + 0.5) * res
    wlat = (nz[:, 1] - half).astype(float) * res
    x = px + f * ux + wlat * vx
    y = py + f * uy + wlat * vy
    iy = np.floor((y - global_map.origin[1]) / res + 1e-9).astype(np.int64)
    ix = np.floor((x - global_map.origin[0]) / res + 1e-9).astype(np.int64)
    h, w = global_map.shape
    if ((iy < 0) | (iy >= h) | (ix < 0) | (ix >= w)).any():
        raise OutOfBoundsError("observed cells fall outside the global raster")


def crop_ego(global_map: GlobalMap, position: tuple[float, float],
             body_heading: float) -> EgoMap:
    """Agent-centered crop of the global map, rotated so the navigation
    direction points up (+row); off-raster cells read unexplored."""
    res = global_map.resolution
    ux, uy = heading_vec(body_heading)
    vx, vy = uy, -ux
    c = EGO_SIZE // 2
    offs = (np.arange(EGO_SIZE) - c) * res
    f, wlat = np.meshgrid(offs, offs, indexing="ij")
    x = position[0] + f * ux + wlat * vx
    y = position[1] + f * uy + wlat * vy
    iy = np.floor((y - global_map.origin[1]) / res + 1e-9).astype(np.int64)
    ix = np.floor((x - global_map.origin[0]) / res + 1e-9).astype(np.int64)
    h, w = global_map.shape
    ok = (iy >= 0) & (iy < h) & (ix >= 0) & (ix < w)
    grid = np.zeros((EGO_SIZE, EGO_SIZE), dtype=np.uint8)
    grid[ok] = global_map.grid[iy[ok], ix[ok]]
    return EgoMap(grid=grid, resolution=res)


def update_object_map(objmap: ObjectMap, scene: Scene, state: AgentState,
                      scan: DepthScan) -> ObjectMap:
    """Record any goal that is inside the camera's field of view, within
    sensor range, and not blocked by occupancy."""
    if scan.ray_angles.shape[0] == 0:
        return objmap
    half_fov = float(np.max(np.abs(scan.ray_angles)))
    cam = state.camera_heading
    ax, ay = state.position
    for idx, goal in enumerate(scene.goal_positions):
        if idx in objmap.sightings:
            continue
        dx = goal[0] - ax
        dy = goal[1] - ay
        dist = math.hypot(dx, dy)
        if dist > scan.max_range:
            continue
        if dist > 0.0:
            bearing = math.degrees(math.atan2(dy, dx))
            off = abs((bearing - cam + 180.0) % 360.0 - 180.0)
            if off > half_fov:
                continue
            _, hit = ray_march(scene, state.position, bearing, dist)
            if hit:
                continue
        objmap.sightings[idx] = tuple(goal)
    return objmap


# ---------------------------------------------------------------------------
# Map dumps: binary PGM with {0, 128, 255} for {unexplored, free, occupied}
# plus a JSON metadata sidecar.
# ---------------------------------------------------------------------------

_PGM_SHADE = np.array([0, 128, 255], dtype=np.uint8)


def save_pgm(grid: np.ndarray, path):
    shades = _PGM_SHADE[grid[::-1]]  # flip so +y is up in the image
    with open(path, "wb") as fh:
        fh.write(f"P5\n{grid.shape[1]} {grid.shape[0]}\n255\n".encode())
        fh.write(shades.tobytes())


def save_map_metadata(path, state: AgentState, step: int):
    meta = {
        "position": list(state.position),
        "body_heading": state.body_heading,
        "camera_offset": state.camera_offset,
        "step": step,
    }
    with open(path, "w") as fh:
        json.dump(meta, fh)
