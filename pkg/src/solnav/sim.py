"""Procedural gridworld episode generation.

Three difficulty tiers share one recipe: lay out walls and landmark boxes,
choose a start pose and a goal cell on the 0.25 m lattice, plan the optimal
action sequence, render one frame per pre-action pose, and phrase a templated
instruction from the route. Everything is deterministic in the seed.
"""

from __future__ import annotations

import math
import random

from .core import FORWARD, TURN_LEFT, TURN_RIGHT, Pose
from .dataset import Episode
from .planner import geodesic_length, oracle_actions, reachable_cells, to_cell
from .render import WALL_RGB, render
from .world import (
    BASE_LABELS,
    CameraModel,
    GenerationError,
    Obstacle,
    WALL_ID,
    World,
    pose_is_free,
    run_actions,
)

DIFFICULTIES = ("corridor", "rooms", "cluttered")

BOUNDS = (8.0, 8.0)

# Landmark categories with stable semantic ids across all worlds.
LANDMARKS = (
    ("door", (155, 85, 35)),
    ("chair", (40, 70, 200)),
    ("table", (230, 140, 40)),
    ("plant", (35, 150, 55)),
    ("sofa", (145, 55, 190)),
    ("shelf", (235, 205, 45)),
    ("lamp", (45, 185, 190)),
    ("crate", (200, 40, 40)),
    ("bed", (235, 125, 180)),
)
LANDMARK_IDS = {name: 3 + i for i, (name, _) in enumerate(LANDMARKS)}
LANDMARK_RGB = {name: rgb for name, rgb in LANDMARKS}


def _snap(value: float) -> float:
    return round(value / 0.25) * 0.25


def _label_table(categories) -> dict[int, str]:
    table = dict(BASE_LABELS)
    for name in categories:
        table[LANDMARK_IDS[name]] = name
    return table


def _wall_box(x0, y0, x1, y1) -> Obstacle:
    return Obstacle(x0, y0, x1, y1, WALL_ID, WALL_RGB)


def _landmark_box(name, x0, y0, x1, y1) -> Obstacle:
    return Obstacle(x0, y0, x1, y1, LANDMARK_IDS[name], LANDMARK_RGB[name])


def _flip(obstacle: Obstacle, flip: bool) -> Obstacle:
    """Mirror an obstacle across the x=y diagonal when flip is set."""
    if not flip:
        return obstacle
    return Obstacle(
        obstacle.y0, obstacle.x0, obstacle.y1, obstacle.x1, obstacle.label_id, obstacle.color
    )


def _flip_xy(point, flip: bool):
    return (point[1], point[0]) if flip else point


def _corridor_layout(seed: int, rng: random.Random) -> tuple[World, dict]:
    # Corridor runs along x; a final transpose randomizes the axis.
    flip = rng.random() < 0.5
    half_width = rng.choice((0.875, 1.0))
    center = rng.choice([1.5 + 0.25 * i for i in range(21)])  # 1.5 .. 6.5
    lo, hi = center - half_width, center + half_width
    door_w = 0.5
    obstacles = [
        _wall_box(0.0, 0.0, BOUNDS[0], lo),
        _wall_box(0.0, hi, BOUNDS[0], BOUNDS[1]),
        _landmark_box("door", BOUNDS[0] - 0.25, center - door_w, BOUNDS[0], center + door_w),
    ]
    goal = (7.0, center)
    start_x = rng.choice((0.75, 1.0, 1.25, 1.5))
    start = (start_x, center)
    heading = rng.choices((0.0, 90.0, 270.0, 180.0), weights=(0.60, 0.175, 0.175, 0.05))[0]
    world = World(
        seed=seed,
        bounds=BOUNDS,
        obstacles=tuple(_flip(o, flip) for o in obstacles),
        label_table=_label_table(["door"]),
        difficulty="corridor",
    )
    meta = {
        "start": _flip_xy(start, flip),
        "goal": _flip_xy(goal, flip),
        "heading": (90.0 - heading) % 360.0 if flip else heading,
        "goal_label": "door",
    }
    return world, meta


def _rooms_layout(seed: int, rng: random.Random) -> tuple[World, dict]:
    # Two rooms split by a wall along y; doorway with door-frame boxes.
    flip = rng.random() < 0.5
    wall_x = rng.choice((3.0, 3.25, 3.5, 3.75, 4.0, 4.25, 4.5))
    gap_c = rng.choice([1.75 + 0.25 * i for i in range(19)])  # 1.75 .. 6.25
    gap_half = 0.625
    frame_w = 0.5
    obstacles = [
        _wall_box(wall_x, 0.0, wall_x + 0.25, gap_c - gap_half - frame_w),
        _landmark_box("door", wall_x, gap_c - gap_half - frame_w, wall_x + 0.25, gap_c - gap_half),
        _landmark_box("door", wall_x, gap_c + gap_half, wall_x + 0.25, gap_c + gap_half + frame_w),
        _wall_box(wall_x, gap_c + gap_half + frame_w, wall_x + 0.25, BOUNDS[1]),
    ]
    categories = ["door"]
    goal_label = rng.choice([name for name, _ in LANDMARKS if name != "door"])
    categories.append(goal_label)
    lm_y = rng.choice([0.75 + 0.25 * i for i in range(27)])  # 0.75 .. 7.25
    obstacles.append(_landmark_box(goal_label, 7.5, lm_y, 8.0, lm_y + 0.5))
    goal = (7.0, _snap(lm_y + 0.25))
    if rng.random() < 0.5:
        decoy = rng.choice([n for n, _ in LANDMARKS if n not in categories])
        categories.append(decoy)
        dy = rng.choice([0.75 + 0.25 * i for i in range(27)])
        obstacles.append(_landmark_box(decoy, 0.0, dy, 0.5, dy + 0.5))
    sx = rng.choice([0.75 + 0.25 * i for i in range(int((wall_x - 1.5) / 0.25) + 1)])
    sy = rng.choice([0.75 + 0.25 * i for i in range(27)])
    heading = rng.randrange(24) * 15.0
    world = World(
        seed=seed,
        bounds=BOUNDS,
        obstacles=tuple(_flip(o, flip) for o in obstacles),
        label_table=_label_table(categories),
        difficulty="rooms",
    )
    meta = {
        "start": _flip_xy((sx, sy), flip),
        "goal": _flip_xy(goal, flip),
        "heading": (90.0 - heading) % 360.0 if flip else heading,
        "goal_label": goal_label,
    }
    return world, meta


def _cluttered_layout(seed: int, rng: random.Random) -> tuple[World, dict]:
    count = rng.randint(5, 8)
    categories = rng.sample([name for name, _ in LANDMARKS if name != "door"], count)
    obstacles: list[Obstacle] = []
    for name in categories:
        for _ in range(40):
            w = rng.choice((0.5, 0.75, 1.0))
            h = rng.choice((0.5, 0.75, 1.0))
            x0 = _snap(rng.uniform(0.75, BOUNDS[0] - 0.75 - w))
            y0 = _snap(rng.uniform(0.75, BOUNDS[1] - 0.75 - h))
            candidate = _landmark_box(name, x0, y0, x0 + w, y0 + h)
            gap_ok = all(
                max(o.x0 - candidate.x1, candidate.x0 - o.x1) > 0.6
                or max(o.y0 - candidate.y1, candidate.y0 - o.y1) > 0.6
                for o in obstacles
            )
            if gap_ok:
                obstacles.append(candidate)
                break
        else:
            raise GenerationError(f"could not place landmark {name} for seed {seed}")
    goal_label = categories[0]
    goal_box = obstacles[0]
    cx, cy = _snap((goal_box.x0 + goal_box.x1) / 2), _snap((goal_box.y0 + goal_box.y1) / 2)
    side = rng.choice(("x+", "x-", "y+", "y-"))
    if side == "x+":
        goal = (_snap(goal_box.x1 + 0.5), cy)
    elif side == "x-":
        goal = (_snap(goal_box.x0 - 0.5), cy)
    elif side == "y+":
        goal = (cx, _snap(goal_box.y1 + 0.5))
    else:
        goal = (cx, _snap(goal_box.y0 - 0.5))
    for _ in range(60):
        sx = rng.choice([0.5 + 0.25 * i for i in range(29)])
        sy = rng.choice([0.5 + 0.25 * i for i in range(29)])
        if math.dist((sx, sy), goal) >= 2.5:
            break
    else:
        raise GenerationError(f"no start candidate for seed {seed}")
    heading = rng.randrange(24) * 15.0
    world = World(
        seed=seed,
        bounds=BOUNDS,
        obstacles=tuple(obstacles),
        label_table=_label_table(categories),
        difficulty="cluttered",
    )
    meta = {
        "start": (sx, sy),
        "goal": goal,
        "heading": heading,
        "goal_label": goal_label,
    }
    return world, meta


_LAYOUTS = {
    "corridor": _corridor_layout,
    "rooms": _rooms_layout,
    "cluttered": _cluttered_layout,
}


def _layout(seed: int, difficulty: str) -> tuple[World, dict]:
    """Generate a world plus start/goal metadata, retrying invalid layouts."""
    if difficulty not in _LAYOUTS:
        raise ValueError(f"unknown difficulty {difficulty!r}; expected one of {DIFFICULTIES}")
    for attempt in range(30):
        rng = random.Random(f"world/{difficulty}/{seed}/{attempt}")
        try:
            world, meta = _LAYOUTS[difficulty](seed, rng)
        except GenerationError:
            continue
        start, goal = meta["start"], meta["goal"]
        if math.dist(start, goal) < 2.0:
            continue
        if not (pose_is_free(world, *start) and pose_is_free(world, *goal)):
            continue
        reach = reachable_cells(world, start)
        if to_cell(*goal) not in reach:
            continue
        return world, meta
    raise GenerationError(f"no valid {difficulty} layout for seed {seed}")


def generate_world(seed: int, difficulty: str) -> World:
    """Deterministic world for (seed, difficulty)."""
    return _layout(seed, difficulty)[0]


def _leading_turn(actions) -> tuple[str, float]:
    direction = ""
    count = 0
    for a in actions:
        if a in (TURN_LEFT, TURN_RIGHT):
            d = "left" if a == TURN_LEFT else "right"
            if direction and d != direction:
                break
            direction = d
            count += 1
        else:
            break
    return direction, count * 15.0


def _turn_phrase(direction: str, degrees: float) -> str:
    if not direction or degrees == 0.0:
        return ""
    if degrees >= 150.0:
        return "turn around"
    if degrees <= 45.0:
        return f"turn slightly {direction}"
    return f"turn {direction}"


def _mid_turn(actions) -> str:
    """Direction of the first turn run after the first forward run."""
    seen_forward = False
    for a in actions:
        if a == FORWARD:
            seen_forward = True
        elif a in (TURN_LEFT, TURN_RIGHT) and seen_forward:
            return "left" if a == TURN_LEFT else "right"
    return ""


def generate_instruction(
    world: World,
    actions,
    rng_seed: int,
    start: Pose | None = None,
    goal: tuple[float, float] | None = None,
    goal_label: str | None = None,
) -> str:
    """Templated route description, deterministic in (world, actions, rng_seed).

    start/goal give the pose context the templates reference; without them
    the phrasing falls back to route shape only.
    """
    rng = random.Random(f"instr/{world.difficulty}/{rng_seed}")
    direction, degrees = _leading_turn(actions)
    prefix = _turn_phrase(direction, degrees)
    prefix = f"{prefix}, then " if prefix else ""
    if goal_label is None and goal is not None:
        best = min(
            world.obstacles,
            key=lambda o: (o.label_id == WALL_ID, _box_point_dist(o, goal)),
            default=None,
        )
        goal_label = world.label_table.get(best.label_id, "goal") if best else "goal"

    if world.difficulty == "corridor":
        return f"{prefix}walk straight ahead and stop at the end of the corridor"
    if world.difficulty == "rooms":
        verb = rng.choice(("go", "walk"))
        mid = _mid_turn(actions)
        mid_clause = f", then turn {mid}" if mid else ""
        return f"{prefix}{verb} through the doorway{mid_clause}, and stop near the {goal_label}"
    passed = ""
    if start is not None:
        poses = run_actions(world, start, actions)
        for o in world.obstacles:
            if o.label_id == WALL_ID or world.label_table[o.label_id] == goal_label:
                continue
            if any(_box_point_dist(o, (p.x, p.y)) < 0.9 for p in poses):
                passed = world.label_table[o.label_id]
                break
    if passed:
        return f"{prefix}head past the {passed} and stop near the {goal_label}"
    template = rng.choice(
        (f"head to the {goal_label} and stop beside it", f"navigate to the {goal_label} and stop")
    )
    return f"{prefix}{template}"


def _box_point_dist(o: Obstacle, p) -> float:
    dx = max(o.x0 - p[0], 0.0, p[0] - o.x1)
    dy = max(o.y0 - p[1], 0.0, p[1] - o.y1)
    return math.hypot(dx, dy)


def generate_episode(seed: int, difficulty: str, camera: CameraModel = CameraModel()) -> Episode:
    """World, oracle trajectory, frames, and instruction for one seed."""
    world, meta = _layout(seed, difficulty)
    start = Pose(meta["start"][0], meta["start"][1], meta["heading"])
    goal = meta["goal"]
    actions = oracle_actions(world, start, goal)
    poses = run_actions(world, start, actions)
    final = poses[-1]
    if math.dist((final.x, final.y), goal) > 0.25 + 1e-9:
        raise GenerationError(f"oracle for seed {seed} missed the goal")
    frames = tuple(render(world, p, camera) for p in poses[:-1])
    instruction = generate_instruction(
        world, actions, seed, start=start, goal=goal, goal_label=meta["goal_label"]
    )
    return Episode(
        episode_id=f"{difficulty}_{seed:05d}",
        instruction=instruction,
        frames=frames,
        actions=tuple(actions),
        start=start,
        goal=goal,
        shortest_path_length=geodesic_length(world, (start.x, start.y), goal),
    )


def episode_world(seed: int, difficulty: str) -> World:
    """The world an episode was generated in (same layout stream)."""
    return _layout(seed, difficulty)[0]
