"""Gridworld geometry: worlds, obstacles, the agent step model, scene files.

Worlds are axis-aligned: a rectangular floor plan bounded by walls, with
axis-aligned box obstacles reaching from floor to ceiling. The agent is a
disk of radius AGENT_RADIUS moving on a 0.25 m lattice with 15-degree
headings 0..345 measured CCW from +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import FORWARD, STOP, TURN_DEGREES, TURN_LEFT, TURN_RIGHT, Pose, check_action

AGENT_RADIUS = 0.15
STEP_METERS = 0.25
WALL_HEIGHT = 2.5

# Fixed semantic ids shared by every generated world.
FLOOR_ID = 0
CEILING_ID = 1
WALL_ID = 2
BASE_LABELS = {FLOOR_ID: "floor", CEILING_ID: "ceiling", WALL_ID: "wall"}

# (cos, sin) for heading index k = heading / 15 degrees. Frozen literals so
# trajectories are bit-identical across platforms and reimplementations.
DIR_TABLE = (
    (1.0, 0.0),
    (0.9659258262890683, 0.25881904510252074),
    (0.8660254037844387, 0.5),
    (0.7071067811865476, 0.7071067811865475),
    (0.5, 0.8660254037844386),
    (0.25881904510252074, 0.9659258262890683),
    (0.0, 1.0),
    (-0.25881904510252085, 0.9659258262890683),
    (-0.5, 0.8660254037844387),
    (-0.7071067811865475, 0.7071067811865476),
    (-0.8660254037844387, 0.5),
    (-0.9659258262890682, 0.258819045102521),
    (-1.0, 0.0),
    (-0.9659258262890683, -0.2588190451025208),
    (-0.8660254037844386, -0.5),
    (-0.7071067811865477, -0.7071067811865475),
    (-0.5, -0.8660254037844384),
    (-0.25881904510252063, -0.9659258262890683),
    (0.0, -1.0),
    (0.2588190451025203, -0.9659258262890684),
    (0.5, -0.8660254037844386),
    (0.7071067811865474, -0.7071067811865477),
    (0.8660254037844384, -0.5),
    (0.9659258262890683, -0.2588190451025207),
)


class NoPathError(Exception):
    """Raised when no action sequence can reach the goal."""


class GenerationError(Exception):
    """Raised when a world or episode cannot be generated for a seed."""


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box from floor to ceiling."""

    x0: float
    y0: float
    x1: float
    y1: float
    label_id: int
    color: tuple[int, int, int]

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate obstacle {(self.x0, self.y0, self.x1, self.y1)}")


@dataclass(frozen=True)
class World:
    seed: int
    bounds: tuple[float, float]
    obstacles: tuple[Obstacle, ...]
    label_table: dict[int, str]
    difficulty: str = "custom"

    def __post_init__(self):
        w, h = self.bounds
        if w <= 0 or h <= 0:
            raise ValueError("bounds must be positive")
        ids = [o.label_id for o in self.obstacles]
        for i in ids:
            if i not in self.label_table:
                raise ValueError(f"obstacle label id {i} missing from label_table")
        for i in BASE_LABELS:
            if i not in self.label_table:
                raise ValueError(f"label_table must include base id {i}")


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera with square pixels looking along the agent heading."""

    width: int = 96
    height: int = 72
    fov_deg: float = 90.0
    camera_height: float = 1.0
    max_range: float = 10.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image size must be at least 1x1")
        if not (0.0 < self.fov_deg < 180.0):
            raise ValueError("fov_deg must be in (0, 180)")
        if not (0.0 < self.camera_height < WALL_HEIGHT):
            raise ValueError("camera must sit between floor and ceiling")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")


def heading_index(heading_deg: float) -> int:
    """Map a heading that is a multiple of 15 degrees to its table index."""
    k = heading_deg / TURN_DEGREES
    ki = round(k)
    if abs(k - ki) > 1e-9:
        raise ValueError(f"heading {heading_deg} is not a multiple of {TURN_DEGREES} degrees")
    return int(ki) % 24


def _segment_point_dist2(ax, ay, bx, by, px, py) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0.0 else max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    dx, dy = wx - t * vx, wy - t * vy
    return dx * dx + dy * dy


def _segments_intersect(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    return False


def _segment_segment_dist2(a, b, c, d) -> float:
    if _segments_intersect(a, b, c, d):
        return 0.0
    return min(
        _segment_point_dist2(*a, *b, *c),
        _segment_point_dist2(*a, *b, *d),
        _segment_point_dist2(*c, *d, *a),
        _segment_point_dist2(*c, *d, *b),
    )


def segment_box_distance(ax, ay, bx, by, box: Obstacle) -> float:
    """Exact euclidean distance between segment AB and an axis-aligned box."""

    def inside(px, py):
        return box.x0 <= px <= box.x1 and box.y0 <= py <= box.y1

    if inside(ax, ay) or inside(bx, by):
        return 0.0
    corners = ((box.x0, box.y0), (box.x1, box.y0), (box.x1, box.y1), (box.x0, box.y1))
    edges = tuple((corners[i], corners[(i + 1) % 4]) for i in range(4))
    best = math.inf
    for c, d in edges:
        best = min(best, _segment_segment_dist2((ax, ay), (bx, by), c, d))
        if best == 0.0:
            break
    return math.sqrt(best)


def point_box_distance(px, py, box: Obstacle) -> float:
    dx = max(box.x0 - px, 0.0, px - box.x1)
    dy = max(box.y0 - py, 0.0, py - box.y1)
    return math.hypot(dx, dy)


def pose_is_free(world: World, x: float, y: float) -> bool:
    """True when an agent disk centered at (x, y) sits in free space."""
    w, h = world.bounds
    if not (AGENT_RADIUS <= x <= w - AGENT_RADIUS and AGENT_RADIUS <= y <= h - AGENT_RADIUS):
        return False
    return all(point_box_distance(x, y, o) >= AGENT_RADIUS for o in world.obstacles)


def move_is_free(world: World, x0: float, y0: float, x1: float, y1: float) -> bool:
    """True when sweeping the agent disk from (x0, y0) to (x1, y1) stays clear."""
    w, h = world.bounds
    if not (AGENT_RADIUS <= x1 <= w - AGENT_RADIUS and AGENT_RADIUS <= y1 <= h - AGENT_RADIUS):
        return False
    return all(segment_box_distance(x0, y0, x1, y1, o) >= AGENT_RADIUS for o in world.obstacles)


def step(world: World, pose: Pose, action: int) -> Pose:
    """Execute one action. A blocked forward leaves the pose unchanged."""
    check_action(action)
    if action == STOP:
        return pose
    if action == TURN_LEFT:
        return Pose(pose.x, pose.y, (pose.heading_deg + TURN_DEGREES) % 360.0)
    if action == TURN_RIGHT:
        return Pose(pose.x, pose.y, (pose.heading_deg - TURN_DEGREES) % 360.0)
    assert action == FORWARD
    dx, dy = DIR_TABLE[heading_index(pose.heading_deg)]
    nx, ny = pose.x + STEP_METERS * dx, pose.y + STEP_METERS * dy
    if not move_is_free(world, pose.x, pose.y, nx, ny):
        return pose
    return Pose(nx, ny, pose.heading_deg)


def run_actions(world: World, start: Pose, actions) -> list[Pose]:
    """Poses visited before each action plus the final pose."""
    poses = [start]
    for a in actions:
        poses.append(step(world, poses[-1], a))
    return poses


SCENE_VERSION = 1


def scene_lines(world: World) -> list[str]:
    """Plain-text scene description, one obstacle per line."""
    lines = [
        f"# solnav scene v{SCENE_VERSION}",
        f"seed={world.seed}",
        f"difficulty={world.difficulty}",
        f"bounds={world.bounds[0]!r} {world.bounds[1]!r}",
        f"wall_height={WALL_HEIGHT!r}",
    ]
    for i in sorted(world.label_table):
        lines.append(f"label={i} {world.label_table[i]}")
    for o in world.obstacles:
        lines.append(
            f"obstacle={o.label_id} {o.x0!r} {o.y0!r} {o.x1!r} {o.y1!r} "
            f"{o.color[0]} {o.color[1]} {o.color[2]}"
        )
    return lines


def write_scene(world: World, path) -> None:
    from pathlib import Path

    Path(path).write_text("\n".join(scene_lines(world)) + "\n", encoding="utf-8", newline="\n")


def parse_scene(text: str) -> World:
    seed = 0
    difficulty = "custom"
    bounds = (0.0, 0.0)
    labels: dict[int, str] = {}
    obstacles: list[Obstacle] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"scene line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        if key == "seed":
            seed = int(value)
        elif key == "difficulty":
            difficulty = value
        elif key == "bounds":
            bx, by = value.split()
            bounds = (float(bx), float(by))
        elif key == "wall_height":
            if abs(float(value) - WALL_HEIGHT) > 1e-9:
                raise ValueError(f"scene line {lineno}: unsupported wall height {value}")
        elif key == "label":
            ident, name = value.split(" ", 1)
            labels[int(ident)] = name
        elif key == "obstacle":
            parts = value.split()
            if len(parts) != 8:
                raise ValueError(f"scene line {lineno}: expected 8 obstacle fields")
            obstacles.append(
                Obstacle(
                    x0=float(parts[1]),
                    y0=float(parts[2]),
                    x1=float(parts[3]),
                    y1=float(parts[4]),
                    label_id=int(parts[0]),
                    color=(int(parts[5]), int(parts[6]), int(parts[7])),
                )
            )
        else:
            raise ValueError(f"scene line {lineno}: unknown key {key!r}")
    return World(
        seed=seed,
        bounds=bounds,
        obstacles=tuple(obstacles),
        label_table=labels,
        difficulty=difficulty,
    )


def read_scene(path) -> World:
    from pathlib import Path

    return parse_scene(Path(path).read_text(encoding="utf-8"))
