"""Shortest-path planning over the discrete pose graph.

States are (ix, iy, ih): positions on the 0.25 m lattice and one of 24
headings. Turns are always available; a forward edge exists only from the
four axis-aligned headings, which is exactly the set of moves that keeps the
position on the lattice. All edges cost one action.
"""

from __future__ import annotations

import heapq
import math

from .core import FORWARD, STOP, TURN_LEFT, TURN_RIGHT, Pose
from .world import DIR_TABLE, STEP_METERS, NoPathError, World, heading_index, move_is_free, pose_is_free

# Heading indices whose forward move stays on the lattice.
AXIS_HEADINGS = (0, 6, 12, 18)
_AXIS_STEPS = {0: (1, 0), 6: (0, 1), 12: (-1, 0), 18: (0, -1)}


def to_cell(x: float, y: float) -> tuple[int, int]:
    ix, iy = round(x / STEP_METERS), round(y / STEP_METERS)
    if abs(x - ix * STEP_METERS) > 1e-6 or abs(y - iy * STEP_METERS) > 1e-6:
        raise ValueError(f"position ({x}, {y}) is not on the {STEP_METERS} m lattice")
    return int(ix), int(iy)


def _forward_checker(world: World):
    cache: dict[tuple[int, int, int], bool] = {}

    def allowed(ix: int, iy: int, ih: int) -> bool:
        key = (ix, iy, ih)
        if key not in cache:
            sx, sy = ix * STEP_METERS, iy * STEP_METERS
            dx, dy = _AXIS_STEPS[ih]
            tx, ty = (ix + dx) * STEP_METERS, (iy + dy) * STEP_METERS
            cache[key] = move_is_free(world, sx, sy, tx, ty)
        return cache[key]

    return allowed


def plan_actions(world: World, start: Pose, goal: tuple[float, float]) -> list[int]:
    """Minimal action sequence from start to the goal cell, ending with stop.

    A* with a manhattan-cells heuristic (each forward covers one cell and
    costs one action; turns only add cost, so the heuristic is admissible).
    Raises NoPathError when the goal cell cannot be reached.
    """
    if not pose_is_free(world, start.x, start.y):
        raise NoPathError("start pose is not in free space")
    if not pose_is_free(world, goal[0], goal[1]):
        raise NoPathError("goal position is not in free space")
    six, siy = to_cell(start.x, start.y)
    gix, giy = to_cell(goal[0], goal[1])
    sih = heading_index(start.heading_deg)
    if (six, siy) == (gix, giy):
        return [STOP]

    allowed = _forward_checker(world)

    def h(ix: int, iy: int) -> int:
        return abs(ix - gix) + abs(iy - giy)

    start_state = (six, siy, sih)
    open_heap: list[tuple[int, int, tuple[int, int, int]]] = []
    counter = 0
    heapq.heappush(open_heap, (h(six, siy), counter, start_state))
    g_cost = {start_state: 0}
    came_from: dict[tuple[int, int, int], tuple[tuple[int, int, int], int]] = {}
    closed: set[tuple[int, int, int]] = set()

    while open_heap:
        _, _, state = heapq.heappop(open_heap)
        if state in closed:
            continue
        closed.add(state)
        ix, iy, ih = state
        if (ix, iy) == (gix, giy):
            actions = []
            cur = state
            while cur != start_state:
                cur, action = came_from[cur]
                actions.append(action)
            actions.reverse()
            actions.append(STOP)
            return actions
        g = g_cost[state]
        neighbors = []
        if ih in _AXIS_STEPS and allowed(ix, iy, ih):
            dx, dy = _AXIS_STEPS[ih]
            neighbors.append(((ix + dx, iy + dy, ih), FORWARD))
        neighbors.append(((ix, iy, (ih + 1) % 24), TURN_LEFT))
        neighbors.append(((ix, iy, (ih - 1) % 24), TURN_RIGHT))
        for nxt, action in neighbors:
            ng = g + 1
            if ng < g_cost.get(nxt, math.inf):
                g_cost[nxt] = ng
                came_from[nxt] = (state, action)
                counter += 1
                heapq.heappush(open_heap, (ng + h(nxt[0], nxt[1]), counter, nxt))
    raise NoPathError(f"no path from cell {(six, siy)} to {(gix, giy)}")


def oracle_actions(world: World, start: Pose, goal: tuple[float, float]) -> list[int]:
    """Alias for plan_actions; the oracle policy is the lattice optimum."""
    return plan_actions(world, start, goal)


def _position_neighbors(world: World, ix: int, iy: int):
    for dx, dy in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        sx, sy = ix * STEP_METERS, iy * STEP_METERS
        tx, ty = (ix + dx) * STEP_METERS, (iy + dy) * STEP_METERS
        if move_is_free(world, sx, sy, tx, ty):
            yield ix + dx, iy + dy


def reachable_cells(world: World, start_xy: tuple[float, float]) -> dict[tuple[int, int], int]:
    """BFS over free lattice positions; maps each reachable cell to its step count."""
    if not pose_is_free(world, start_xy[0], start_xy[1]):
        return {}
    start = to_cell(start_xy[0], start_xy[1])
    dist = {start: 0}
    queue = [start]
    while queue:
        nxt_queue = []
        for ix, iy in queue:
            d = dist[(ix, iy)]
            for cell in _position_neighbors(world, ix, iy):
                if cell not in dist:
                    dist[cell] = d + 1
                    nxt_queue.append(cell)
        queue = nxt_queue
    return dist


def geodesic_length(world: World, start_xy: tuple[float, float], goal_xy: tuple[float, float]) -> float:
    """Lattice-geodesic distance in meters between two free positions."""
    start = to_cell(start_xy[0], start_xy[1])
    goal = to_cell(goal_xy[0], goal_xy[1])
    if start == goal:
        return 0.0
    dist = reachable_cells(world, start_xy)
    if goal not in dist:
        raise NoPathError(f"goal cell {goal} unreachable from {start}")
    return dist[goal] * STEP_METERS
