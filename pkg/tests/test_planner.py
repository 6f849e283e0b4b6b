"""Planner tests: lattice A*, BFS reachability, geodesic distances."""

from __future__ import annotations

import collections
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solnav.core import FORWARD, STOP, TURN_LEFT, TURN_RIGHT, Pose
from solnav.planner import (
    AXIS_HEADINGS,
    geodesic_length,
    oracle_actions,
    plan_actions,
    reachable_cells,
    to_cell,
)
from solnav.world import (
    DIR_TABLE,
    STEP_METERS,
    NoPathError,
    Obstacle,
    World,
    heading_index,
    move_is_free,
    pose_is_free,
    run_actions,
    step,
)

BASE_TABLE = {0: "floor", 1: "ceiling", 2: "wall"}


def empty_world(side: float = 4.0) -> World:
    return World(seed=0, bounds=(side, side), obstacles=(), label_table=dict(BASE_TABLE))


def world_with_boxes(boxes, side: float = 4.0) -> World:
    obstacles = tuple(Obstacle(*b, label_id=2, color=(120, 120, 120)) for b in boxes)
    return World(seed=0, bounds=(side, side), obstacles=obstacles, label_table=dict(BASE_TABLE))


# Independent oracle: plain BFS over the full (ix, iy, ih) pose graph. Every
# edge costs one action, so BFS depth equals the optimal action count minus
# the trailing stop.
def bfs_plan_cost(world: World, start: Pose, goal: tuple[float, float]) -> int | None:
    six, siy = to_cell(start.x, start.y)
    gix, giy = to_cell(goal[0], goal[1])
    sih = heading_index(start.heading_deg)
    if (six, siy) == (gix, giy):
        return 0
    start_state = (six, siy, sih)
    seen = {start_state}
    frontier = collections.deque([(start_state, 0)])
    axis_steps = {0: (1, 0), 6: (0, 1), 12: (-1, 0), 18: (0, -1)}
    while frontier:
        (ix, iy, ih), d = frontier.popleft()
        nxt_states = [(ix, iy, (ih + 1) % 24), (ix, iy, (ih - 1) % 24)]
        if ih in axis_steps:
            dx, dy = axis_steps[ih]
            sx, sy = ix * STEP_METERS, iy * STEP_METERS
            tx, ty = (ix + dx) * STEP_METERS, (iy + dy) * STEP_METERS
            if move_is_free(world, sx, sy, tx, ty):
                nxt_states.append((ix + dx, iy + dy, ih))
        for state in nxt_states:
            if state in seen:
                continue
            if (state[0], state[1]) == (gix, giy):
                return d + 1
            seen.add(state)
            frontier.append((state, d + 1))
    return None


# Independent oracle: flood fill over positions only (forward moves between
# adjacent lattice cells), ignoring headings.
def flood_fill_cells(world: World, start_xy: tuple[float, float]) -> dict[tuple[int, int], int]:
    if not pose_is_free(world, start_xy[0], start_xy[1]):
        return {}
    start = to_cell(start_xy[0], start_xy[1])
    dist = {start: 0}
    frontier = collections.deque([start])
    while frontier:
        ix, iy = frontier.popleft()
        for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            cell = (ix + dx, iy + dy)
            if cell in dist:
                continue
            if move_is_free(world, ix * STEP_METERS, iy * STEP_METERS, cell[0] * STEP_METERS, cell[1] * STEP_METERS):
                dist[cell] = dist[(ix, iy)] + 1
                frontier.append(cell)
    return dist


class TestToCell:
    def test_on_lattice(self):
        assert to_cell(0.0, 0.0) == (0, 0)
        assert to_cell(1.0, 0.75) == (4, 3)
        assert to_cell(-0.5, 2.25) == (-2, 9)

    def test_off_lattice_rejected(self):
        with pytest.raises(ValueError):
            to_cell(0.1, 0.0)
        with pytest.raises(ValueError):
            to_cell(0.0, 1.13)


class TestPlanExamples:
    def test_straight_ahead(self):
        world = empty_world()
        start = Pose(1.0, 2.0, 0.0)
        assert plan_actions(world, start, (2.0, 2.0)) == [FORWARD] * 4 + [STOP]

    def test_goal_behind_costs_17(self):
        world = empty_world()
        start = Pose(2.0, 2.0, 0.0)
        actions = plan_actions(world, start, (1.0, 2.0))
        assert len(actions) == 17
        turns = [a for a in actions if a in (TURN_LEFT, TURN_RIGHT)]
        assert len(turns) == 12
        # 180 degrees one way; mixing directions would waste actions.
        assert len(set(turns)) == 1
        assert actions.count(FORWARD) == 4
        assert actions[-1] == STOP

    def test_start_equals_goal(self):
        world = empty_world()
        assert plan_actions(world, Pose(1.0, 1.0, 45.0), (1.0, 1.0)) == [STOP]

    def test_oracle_actions_alias(self):
        world = empty_world()
        start = Pose(1.0, 2.0, 90.0)
        assert oracle_actions(world, start, (1.0, 3.0)) == plan_actions(world, start, (1.0, 3.0))

    def test_initial_heading_changes_cost(self):
        world = empty_world()
        goal = (2.0, 2.0)
        straight = plan_actions(world, Pose(1.0, 2.0, 0.0), goal)
        angled = plan_actions(world, Pose(1.0, 2.0, 45.0), goal)
        assert len(angled) == len(straight) + 3

    def test_start_not_free_raises(self):
        world = world_with_boxes([(1.0, 1.0, 2.0, 2.0)])
        with pytest.raises(NoPathError):
            plan_actions(world, Pose(1.5, 1.5, 0.0), (3.0, 3.0))

    def test_goal_not_free_raises(self):
        world = world_with_boxes([(1.0, 1.0, 2.0, 2.0)])
        with pytest.raises(NoPathError):
            plan_actions(world, Pose(0.5, 0.5, 0.0), (1.5, 1.5))

    def test_sealed_goal_raises(self):
        # Box ring around the goal cell leaves no opening.
        world = world_with_boxes(
            [
                (2.0, 2.0, 3.5, 2.25),
                (2.0, 2.75, 3.5, 3.0),
                (2.0, 2.25, 2.25, 2.75),
                (3.25, 2.25, 3.5, 2.75),
            ]
        )
        assert pose_is_free(world, 2.75, 2.5)
        with pytest.raises(NoPathError):
            plan_actions(world, Pose(0.5, 0.5, 0.0), (2.75, 2.5))


class TestPlanOptimalityAndValidity:
    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_matches_bfs_on_small_worlds(self, data):
        # Brute-force BFS over the same pose graph must agree on cost.
        n_boxes = data.draw(st.integers(0, 2), label="n_boxes")
        boxes = []
        for k in range(n_boxes):
            x0 = data.draw(st.integers(2, 10), label=f"x0_{k}") * 0.25
            y0 = data.draw(st.integers(2, 10), label=f"y0_{k}") * 0.25
            w = data.draw(st.integers(1, 4), label=f"w_{k}") * 0.25
            h = data.draw(st.integers(1, 4), label=f"h_{k}") * 0.25
            boxes.append((x0, y0, min(x0 + w, 3.75), min(y0 + h, 3.75)))
        world = world_with_boxes([b for b in boxes if b[0] < b[2] and b[1] < b[3]])

        def free_cell(label):
            for _ in range(50):
                ix = data.draw(st.integers(2, 14), label=f"{label}_ix")
                iy = data.draw(st.integers(2, 14), label=f"{label}_iy")
                if pose_is_free(world, ix * 0.25, iy * 0.25):
                    return ix, iy
            return None

        s = free_cell("start")
        g = free_cell("goal")
        if s is None or g is None:
            return
        heading = data.draw(st.sampled_from(range(0, 360, 15)), label="heading")
        start = Pose(s[0] * 0.25, s[1] * 0.25, float(heading))
        goal = (g[0] * 0.25, g[1] * 0.25)

        expected = bfs_plan_cost(world, start, goal)
        if expected is None:
            with pytest.raises(NoPathError):
                plan_actions(world, start, goal)
            return
        actions = plan_actions(world, start, goal)
        assert actions[-1] == STOP
        assert len(actions) - 1 == expected

        # Validity: executing the plan lands within one lattice step of goal.
        poses = run_actions(world, start, actions)
        final = poses[-1]
        assert math.dist((final.x, final.y), goal) <= 0.25 + 1e-9
        # The plan never tries a blocked forward.
        cur = start
        for a in actions:
            nxt = step(world, cur, a)
            if a == FORWARD:
                assert (nxt.x, nxt.y) != (cur.x, cur.y)
            cur = nxt

    def test_detour_around_wall(self):
        # Wall with a gap forces a measurable detour.
        world = world_with_boxes([(1.75, 0.0, 2.0, 3.0)])
        start = Pose(1.0, 1.0, 0.0)
        goal = (3.0, 1.0)
        actions = plan_actions(world, start, goal)
        cost = bfs_plan_cost(world, start, goal)
        assert len(actions) - 1 == cost
        assert len(actions) > 9  # straight-line would be 8 forwards + stop
        poses = run_actions(world, start, actions)
        assert math.dist((poses[-1].x, poses[-1].y), goal) <= 0.25 + 1e-9


class TestReachableCells:
    def test_matches_flood_fill(self):
        world = world_with_boxes([(1.75, 0.0, 2.0, 3.0), (2.5, 2.5, 3.0, 3.0)])
        got = reachable_cells(world, (1.0, 1.0))
        assert got == flood_fill_cells(world, (1.0, 1.0))

    def test_empty_world_counts(self):
        # Free cells keep the 0.15 m agent radius clear of the outer walls,
        # so both coordinates live on cells 1..14 out of a 17-wide index range.
        world = empty_world()
        cells = reachable_cells(world, (2.0, 2.0))
        assert cells == flood_fill_cells(world, (2.0, 2.0))
        assert cells[(8, 8)] == 0
        assert all(1 <= ix <= 15 and 1 <= iy <= 15 for ix, iy in cells)

    def test_blocked_start_empty(self):
        world = world_with_boxes([(1.0, 1.0, 2.0, 2.0)])
        assert reachable_cells(world, (1.5, 1.5)) == {}

    def test_distances_are_bfs_depths(self):
        world = empty_world()
        cells = reachable_cells(world, (2.0, 2.0))
        assert cells[(9, 8)] == 1
        assert cells[(9, 9)] == 2
        assert cells[(6, 7)] == 3


class TestGeodesic:
    def test_zero_for_same_cell(self):
        assert geodesic_length(empty_world(), (1.0, 1.0), (1.0, 1.0)) == 0.0

    def test_manhattan_in_open_space(self):
        world = empty_world()
        assert geodesic_length(world, (1.0, 1.0), (2.0, 1.0)) == pytest.approx(1.0)
        assert geodesic_length(world, (1.0, 1.0), (2.0, 2.5)) == pytest.approx(1.0 + 1.5)

    def test_quarter_step_times_bfs(self):
        world = world_with_boxes([(1.75, 0.0, 2.0, 3.0)])
        dist = flood_fill_cells(world, (1.0, 1.0))
        goal = (3.0, 1.0)
        assert geodesic_length(world, (1.0, 1.0), goal) == pytest.approx(dist[to_cell(*goal)] * STEP_METERS)

    def test_unreachable_raises(self):
        world = world_with_boxes([(1.75, 0.0, 2.0, 4.0)])
        with pytest.raises(NoPathError):
            geodesic_length(world, (1.0, 1.0), (3.0, 1.0))


class TestAxisHeadings:
    def test_axis_headings_are_cardinal(self):
        assert AXIS_HEADINGS == (0, 6, 12, 18)
        for ih in AXIS_HEADINGS:
            dx, dy = DIR_TABLE[ih]
            assert {abs(dx), abs(dy)} == {0.0, 1.0}
