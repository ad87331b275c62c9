"""Geodesic distances and shortest paths on occupancy-derived grids.

Paths are 8-connected with straight cost `res` and diagonal cost
`res*sqrt(2)`; squeezing diagonally between two occupied cells is not
allowed. Distances are accumulated as integer (straight, diagonal) step
counts and converted to meters by one canonical formula, so the A* search
and the Dijkstra flood fill return bitwise-identical values whenever they
agree on the step composition (which they must: distinct compositions
never have equal cost).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit

from .geometry import RESOLUTION

SQRT2 = math.sqrt(2.0)


class Navigability(Enum):
    OPTIMISTIC = "optimistic"   # free and unexplored cells are navigable
    FREE_ONLY = "free_only"     # only observed-free cells are navigable


@dataclass
class NavGrid:
    passable: np.ndarray   # bool, shape (rows, cols)
    resolution: float = RESOLUTION

    @property
    def shape(self) -> tuple[int, int]:
        return self.passable.shape


@dataclass
class PathResult:
    reachable: bool
    distance: float                         # meters, +inf when unreachable
    waypoints: list[tuple[int, int]] = field(default_factory=list)


def make_navgrid(global_map, mode: Navigability) -> NavGrid:
    """Navigability mask from a three-valued occupancy map."""
    grid = global_map.grid
    if mode is Navigability.OPTIMISTIC:
        passable = grid != 2
    elif mode is Navigability.FREE_ONLY:
        passable = grid == 1
    else:
        raise ValueError(f"unknown navigability mode: {mode!r}")
    return NavGrid(passable=passable, resolution=global_map.resolution)


def navgrid_from_scene(scene) -> NavGrid:
    """Ground-truth navigability: exactly the scene's free cells."""
    return NavGrid(passable=~scene.occupied, resolution=scene.resolution)


def canonical_distance(straight: int, diagonal: int, res: float) -> float:
    """Meters for a path of `straight` axis steps and `diagonal` diagonal
    steps. The single shared formula behind every distance this module
    reports."""
    return res * (straight + diagonal * SQRT2)


@njit(cache=True)
def _heap_push(keys, rows, cols, nodes, size, key, row, col, node):
    i = size
    keys[i] = key
    rows[i] = row
    cols[i] = col
    nodes[i] = node
    while i > 0:
        p = (i - 1) // 2
        if (keys[p] < keys[i]) or (
            keys[p] == keys[i] and (rows[p] < rows[i] or (rows[p] == rows[i] and cols[p] <= cols[i]))
        ):
            break
        keys[p], keys[i] = keys[i], keys[p]
        rows[p], rows[i] = rows[i], rows[p]
        cols[p], cols[i] = cols[i], cols[p]
        nodes[p], nodes[i] = nodes[i], nodes[p]
        i = p
    return size + 1


@njit(cache=True)
def _heap_pop(keys, rows, cols, nodes, size):
    top = nodes[0]
    size -= 1
    keys[0] = keys[size]
    rows[0] = rows[size]
    cols[0] = cols[size]
    nodes[0] = nodes[size]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < size and (
            keys[l] < keys[m]
            or (keys[l] == keys[m] and (rows[l] < rows[m] or (rows[l] == rows[m] and cols[l] < cols[m])))
        ):
            m = l
        if r < size and (
            keys[r] < keys[m]
            or (keys[r] == keys[m] and (rows[r] < rows[m] or (rows[r] == rows[m] and cols[r] < cols[m])))
        ):
            m = r
        if m == i:
            break
        keys[i], keys[m] = keys[m], keys[i]
        rows[i], rows[m] = rows[m], rows[i]
        cols[i], cols[m] = cols[m], cols[i]
        nodes[i], nodes[m] = nodes[m], nodes[i]
        i = m
    return top, size


@njit(cache=True)
def _astar_kernel(passable, sr, sc, gr, gc, res, limit):
    """A* with an octile heuristic. Returns (found, straight, diagonal,
    parents) where parents encodes the tie-broken shortest path tree.

    The open list orders by (f, row, col); expanding in that order makes
    tie-breaking deterministic. Nodes whose f exceeds `limit` are pruned,
    turning the search into a bounded query.
    """
    h, w = passable.shape
    n = h * w
    sqrt2 = SQRT2
    g_straight = np.full(n, -1, np.int64)
    g_diag = np.full(n, -1, np.int64)
    g_cost = np.full(n, np.inf, np.float64)
    parents = np.full(n, -1, np.int64)
    closed = np.zeros(n, np.uint8)

    cap = 16 * n + 64
    keys = np.empty(cap, np.float64)
    krows = np.empty(cap, np.int64)
    kcols = np.empty(cap, np.int64)
    knodes = np.empty(cap, np.int64)
    size = 0

    start = sr * w + sc
    goal = gr * w + gc
    g_straight[start] = 0
    g_diag[start] = 0
    g_cost[start] = 0.0
    dxs = max(gr - sr, sr - gr)
    dys = max(gc - sc, sc - gc)
    lo = min(dxs, dys)
    hi = max(dxs, dys)
    h0 = res * ((hi - lo) + lo * sqrt2)
    size = _heap_push(keys, krows, kcols, knodes, size, h0, sr, sc, start)

    while size > 0:
        node, size = _heap_pop(keys, krows, kcols, knodes, size)
        if closed[node]:
            continue
        closed[node] = 1
        if node == goal:
            return True, g_straight[goal], g_diag[goal], parents
        cr = node // w
        cc = node % w
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                if dr == 0 and dc == 0:
                    continue
                nr = cr + dr
                nc = cc + dc
                if nr < 0 or nr >= h or nc < 0 or nc >= w:
                    continue
                if not passable[nr, nc]:
                    continue
                diag = dr != 0 and dc != 0
                if diag and not (passable[cr + dr, cc] and passable[cr, cc + dc]):
                    continue
                if diag:
                    na = g_straight[node]
                    nb = g_diag[node] + 1
                else:
                    na = g_straight[node] + 1
                    nb = g_diag[node]
                ng = res * (na + nb * sqrt2)
                nn = nr * w + nc
                if ng < g_cost[nn]:
                    g_cost[nn] = ng
                    g_straight[nn] = na
                    g_diag[nn] = nb
                    parents[nn] = node
                    dr2 = max(gr - nr, nr - gr)
                    dc2 = max(gc - nc, nc - gc)
                    lo2 = min(dr2, dc2)
                    hi2 = max(dr2, dc2)
                    f = ng + res * ((hi2 - lo2) + lo2 * sqrt2)
                    if f > limit:
                        continue
                    size = _heap_push(keys, krows, kcols, knodes, size, f, nr, nc, nn)
    return False, np.int64(-1), np.int64(-1), parents


@njit(cache=True)
def _dijkstra_kernel(passable, sr, sc, res, limit):
    """Uniform-cost flood fill from one source. Returns the (straight,
    diagonal) step-count arrays, -1 where unreached."""
    h, w = passable.shape
    n = h * w
    sqrt2 = SQRT2
    g_straight = np.full(n, -1, np.int64)
    g_diag = np.full(n, -1, np.int64)
    g_cost = np.full(n, np.inf, np.float64)
    closed = np.zeros(n, np.uint8)

    cap = 16 * n + 64
    keys = np.empty(cap, np.float64)
    krows = np.empty(cap, np.int64)
    kcols = np.empty(cap, np.int64)
    knodes = np.empty(cap, np.int64)
    size = 0

    start = sr * w + sc
    g_straight[start] = 0
    g_diag[start] = 0
    g_cost[start] = 0.0
    size = _heap_push(keys, krows, kcols, knodes, size, 0.0, sr, sc, start)

    while size > 0:
        node, size = _heap_pop(keys, krows, kcols, knodes, size)
        if closed[node]:
            continue
        closed[node] = 1
        cr = node // w
        cc = node % w
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                if dr == 0 and dc == 0:
                    continue
                nr = cr + dr
                nc = cc + dc
                if nr < 0 or nr >= h or nc < 0 or nc >= w:
                    continue
                if not passable[nr, nc]:
                    continue
                diag = dr != 0 and dc != 0
                if diag and not (passable[cr + dr, cc] and passable[cr, cc + dc]):
                    continue
                if diag:
                    na = g_straight[node]
                    nb = g_diag[node] + 1
                else:
                    na = g_straight[node] + 1
                    nb = g_diag[node]
                ng = res * (na + nb * sqrt2)
                if ng > limit:
                    continue
                nn = nr * w + nc
                if ng < g_cost[nn]:
                    g_cost[nn] = ng
                    g_straight[nn] = na
                    g_diag[nn] = nb
                    size = _heap_push(keys, krows, kcols, knodes, size, ng, nr, nc, nn)
    return g_straight, g_diag


def astar(grid: NavGrid, start: tuple[int, int], goal: tuple[int, int],
          limit: float = np.inf) -> PathResult:
    """Shortest 8-connected path. Unreachable goals yield reachable=False
    with distance +inf rather than an error; `limit` bounds the search
    (anything farther reports unreachable)."""
    h, w = grid.shape
    sr, sc = start
    gr, gc = goal
    if not (0 <= sr < h and 0 <= sc < w) or not grid.passable[sr, sc]:
        raise ValueError(f"start {start} not passable")
    if not (0 <= gr < h and 0 <= gc < w) or not grid.passable[gr, gc]:
        return PathResult(reachable=False, distance=np.inf)
    found, a, b, parents = _astar_kernel(grid.passable, sr, sc, gr, gc,
                                         grid.resolution, limit)
    if not found:
        return PathResult(reachable=False, distance=np.inf)
    waypoints = []
    node = gr * w + gc
    while node >= 0:
        waypoints.append((node // w, node % w))
        node = parents[node]
    waypoints.reverse()
    return PathResult(reachable=True,
                      distance=canonical_distance(int(a), int(b), grid.resolution),
                      waypoints=waypoints)


def geodesic_distance(grid: NavGrid, start: tuple[int, int], goal: tuple[int, int],
                      limit: float = np.inf) -> float:
    """A* distance in meters; +inf when unreachable (or beyond `limit`)."""
    if start == goal:
        sr, sc = start
        if not grid.passable[sr, sc]:
            raise ValueError(f"start {start} not passable")
        return 0.0
    return astar(grid, start, goal, limit=limit).distance


def dijkstra_field(grid: NavGrid, start: tuple[int, int],
                   limit: float = np.inf) -> np.ndarray:
    """Exact geodesic distance from `start` to every cell (meters, +inf
    where unreachable). Independent of the A* route: a plain flood fill."""
    sr, sc = start
    h, w = grid.shape
    if not (0 <= sr < h and 0 <= sc < w) or not grid.passable[sr, sc]:
        raise ValueError(f"start {start} not passable")
    a, b = _dijkstra_kernel(grid.passable, sr, sc, grid.resolution, limit)
    a = a.reshape(h, w)
    b = b.reshape(h, w)
    dist = grid.resolution * (a + b * SQRT2)
    dist[a < 0] = np.inf
    return dist
