import math

import numpy as np

from camnav.frontier import (
    Frontier,
    NavTarget,
    TargetKind,
    detect_frontiers,
    frontier_mask,
    local_controller,
    nav_policy_step,
    select_target,
)
from camnav.mapping import (
    FREE,
    OCCUPIED,
    UNEXPLORED,
    GlobalMap,
    ObjectMap,
    build_local_map,
    register,
)
from camnav.planning import Navigability, PathResult, astar, dijkstra_field, make_navgrid
from camnav.world import AgentState, CameraAction, NavAction, raycast

from conftest import make_room


def gmap_from(grid):
    gm = GlobalMap(grid=np.asarray(grid, dtype=np.uint8), origin=(0.0, 0.0))
    gm.explored_cells = int((gm.grid > 0).sum())
    return gm


class TestDetectFrontiers:
    def test_fully_explored_has_none(self):
        gm = gmap_from(np.full((20, 20), FREE))
        assert detect_frontiers(gm) == []

    def test_straight_boundary_single_cluster(self):
        grid = np.zeros((20, 20), dtype=np.uint8)
        grid[:, :10] = FREE
        gm = gmap_from(grid)
        frontiers = detect_frontiers(gm)
        assert len(frontiers) == 1
        assert len(frontiers[0].cells) == 20  # the whole free/unknown seam

    def test_two_pockets_two_clusters_match_exhaustive_scan(self):
        grid = np.full((24, 24), FREE, dtype=np.uint8)
        grid[4:8, 4:8] = UNEXPLORED
        grid[14:20, 14:20] = UNEXPLORED
        gm = gmap_from(grid)
        frontiers = detect_frontiers(gm)
        assert len(frontiers) == 2
        # exhaustive per-cell predicate
        expected = set()
        for iy in range(24):
            for ix in range(24):
                if grid[iy, ix] != FREE:
                    continue
                for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    ny, nx = iy + dy, ix + dx
                    if 0 <= ny < 24 and 0 <= nx < 24 and grid[ny, nx] == UNEXPLORED:
                        expected.add((iy, ix))
                        break
        got = {c for f in frontiers for c in f.cells}
        assert got == expected

    def test_small_speckle_filtered(self):
        grid = np.full((20, 20), FREE, dtype=np.uint8)
        grid[5, 5] = UNEXPLORED  # 4-cell halo? no: the 4 neighbors are frontier
        gm = gmap_from(grid)
        # the 4 frontier cells around one unknown cell form one 8-connected
        # cluster of size 4, which survives; shrink to a corner case
        grid2 = np.full((20, 20), FREE, dtype=np.uint8)
        grid2[0, 0] = UNEXPLORED
        gm2 = gmap_from(grid2)
        assert detect_frontiers(gm2) == []  # 2-cell cluster drops

    def test_every_returned_cell_satisfies_predicate(self, rng):
        grid = rng.choice([0, 1, 2], size=(40, 40), p=[0.3, 0.5, 0.2]).astype(np.uint8)
        gm = gmap_from(grid)
        mask = frontier_mask(gm)
        for f in detect_frontiers(gm, min_cluster=1):
            for iy, ix in f.cells:
                assert mask[iy, ix]
            assert f.representative in f.cells


class TestSelectTarget:
    def test_goal_priority_over_frontiers(self):
        grid = np.full((40, 40), FREE, dtype=np.uint8)
        grid[30:, :] = UNEXPLORED  # plenty of frontier left
        gm = gmap_from(grid)
        objmap = ObjectMap(sightings={0: (2.0, 1.0)})
        st = AgentState(position=(1.0, 1.0), body_heading=0.0)
        target = select_target(gm, objmap, st)
        assert target.kind is TargetKind.GOAL
        assert target.cell == gm.cell_index(2.0, 1.0)
        assert target.path.reachable

    def test_single_frontier_selected(self):
        grid = np.zeros((30, 30), dtype=np.uint8)
        grid[:15, :] = FREE
        gm = gmap_from(grid)
        st = AgentState(position=(1.0, 0.5), body_heading=0.0)
        target = select_target(gm, ObjectMap(), st)
        assert target.kind is TargetKind.FRONTIER
        assert target.path.reachable

    def test_nearest_of_three_frontiers_by_brute_force(self):
        grid = np.full((60, 60), OCCUPIED, dtype=np.uint8)
        # three corridors of free space ending in unexplored pockets
        for row, length in ((10, 20), (30, 34), (50, 12)):
            grid[row - 1:row + 2, 1:length] = FREE
            grid[row - 1:row + 2, length:length + 4] = UNEXPLORED
        grid[1:59, 1:4] = FREE  # connecting spine
        gm = gmap_from(grid)
        st = AgentState(position=(0.2, 30 * 0.08), body_heading=0.0)
        target = select_target(gm, ObjectMap(), st)
        assert target.kind is TargetKind.FRONTIER
        # brute force: geodesic to every frontier representative
        navgrid = make_navgrid(gm, Navigability.OPTIMISTIC)
        agent_cell = gm.cell_index(*st.position)
        best = None
        for f in detect_frontiers(gm):
            d = astar(navgrid, agent_cell, f.representative).distance
            key = (d, f.representative)
            if best is None or key < best[0]:
                best = (key, f.representative)
        assert target.cell == best[1]

    def test_exhausted_map_returns_none(self):
        gm = gmap_from(np.full((20, 20), FREE))
        st = AgentState(position=(0.5, 0.5), body_heading=0.0)
        assert select_target(gm, ObjectMap(), st).kind is TargetKind.NONE


class TestLocalController:
    def path_to(self, cells):
        return NavTarget(kind=TargetKind.FRONTIER, cell=cells[-1],
                         path=PathResult(reachable=True, distance=1.0, waypoints=cells))

    def test_waypoint_ahead_forward(self):
        st = AgentState(position=(0.52, 0.52), body_heading=0.0)
        target = self.path_to([(6, 6), (6, 11)])  # 0.4 m ahead along +x
        assert local_controller(st, target, 0.08) is NavAction.FORWARD

    def test_waypoint_left_turns_left(self):
        st = AgentState(position=(0.52, 0.52), body_heading=0.0)
        target = self.path_to([(6, 6), (11, 6)])  # +y is 90 degrees left
        assert local_controller(st, target, 0.08) is NavAction.TURN_LEFT

    def test_minus_sixteen_degrees_turns_right(self):
        st = AgentState(position=(0.04, 0.04), body_heading=16.0)
        target = self.path_to([(0, 13)])  # bearing exactly 0, phi = -16
        assert local_controller(st, target, 0.08) is NavAction.TURN_RIGHT

    def test_boundary_fifteen_degrees_goes_forward(self):
        st = AgentState(position=(0.04, 0.04), body_heading=15.0)
        target = self.path_to([(0, 13)])
        assert local_controller(st, target, 0.08) is NavAction.FORWARD


class TestNavPolicyStep:
    def test_orients_toward_nearest_frontier(self):
        grid = np.zeros((50, 50), dtype=np.uint8)
        grid[:, :25] = FREE  # frontier seam along x = 2.0
        gm = gmap_from(grid)
        st = AgentState(position=(1.0, 2.0), body_heading=180.0)
        action = nav_policy_step(gm, ObjectMap(), st)
        # seam is toward +x (bearing 0); from heading 180 turning is needed
        assert action in (NavAction.TURN_LEFT, NavAction.TURN_RIGHT)
        st2 = AgentState(position=(1.0, 2.0), body_heading=0.0)
        assert nav_policy_step(gm, ObjectMap(), st2) is NavAction.FORWARD

    def test_goal_ahead_drives_forward(self):
        grid = np.full((50, 50), FREE, dtype=np.uint8)
        gm = gmap_from(grid)
        objmap = ObjectMap(sightings={0: (3.0, 2.0)})
        st = AgentState(position=(1.0, 2.0), body_heading=0.0)
        assert nav_policy_step(gm, objmap, st) is NavAction.FORWARD

    def test_exhausted_map_falls_back_to_rotation(self):
        gm = gmap_from(np.full((20, 20), FREE))
        st = AgentState(position=(0.5, 0.5), body_heading=0.0)
        assert nav_policy_step(gm, ObjectMap(), st) is NavAction.TURN_LEFT

    def test_deterministic(self):
        grid = np.zeros((40, 40), dtype=np.uint8)
        grid[:20, :20] = FREE
        grid[5:9, 5:9] = OCCUPIED
        gm = gmap_from(grid)
        st = AgentState(position=(1.2, 0.6), body_heading=60.0)
        actions = {nav_policy_step(gm, ObjectMap(), st) for _ in range(5)}
        assert len(actions) == 1

    def test_progress_on_static_map(self):
        from camnav.world import step as world_step
        scene = make_room(60, 60)
        grid = np.full((60, 60), FREE, dtype=np.uint8)
        grid[40:46, 40:46] = UNEXPLORED
        gm = GlobalMap(grid=grid, origin=(0.0, 0.0))
        gm.explored_cells = int((grid > 0).sum())
        st = AgentState(position=(0.52, 0.52), body_heading=0.0)
        navgrid = make_navgrid(gm, Navigability.OPTIMISTIC)
        target = select_target(gm, ObjectMap(), st)
        dist = dijkstra_field(navgrid, gm.cell_index(*st.position))[target.cell]
        stalls = 0
        for _ in range(60):
            action = nav_policy_step(gm, ObjectMap(), st)
            st = world_step(scene, st, action, CameraAction.KEEP).new_state
            d = dijkstra_field(navgrid, gm.cell_index(*st.position))[target.cell]
            if d < dist - 1e-9:
                stalls = 0
            else:
                stalls += 1
            assert stalls <= 2, "no geodesic progress within two steps"
            dist = min(dist, d)
            if d < 0.3:
                break
        assert dist < 0.3