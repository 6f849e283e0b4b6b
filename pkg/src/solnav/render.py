"""Column raycaster producing RGB-D segmentation frames.

Each image column casts one planar ray. The nearest box or boundary-wall hit
fixes the column's surface distance; rows above and below the projected wall
span are filled with ceiling and floor. Depth is z-depth (distance along the
view axis), clamped to the camera range. Colors are flat per surface with
distance-proportional dimming, so nearer surfaces render brighter.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Frame, Pose
from .world import (
    CEILING_ID,
    FLOOR_ID,
    WALL_HEIGHT,
    WALL_ID,
    CameraModel,
    DIR_TABLE,
    World,
    heading_index,
    pose_is_free,
)

FLOOR_RGB = (128, 128, 132)
CEILING_RGB = (242, 242, 238)
WALL_RGB = (204, 198, 186)

# Linear dimming: full brightness up close, 25 percent at and beyond ~10 m.
_DIM_SLOPE = 0.075
_DIM_FLOOR = 0.25


def _shade(depth: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - _DIM_SLOPE * depth, _DIM_FLOOR, 1.0)


def render(world: World, pose: Pose, camera: CameraModel = CameraModel()) -> Frame:
    """Render the world from a pose. The pose must be in free space."""
    if not pose_is_free(world, pose.x, pose.y):
        raise ValueError(f"cannot render from pose inside an obstacle or wall: {pose}")

    w_px, h_px = camera.width, camera.height
    tan_half = math.tan(math.radians(camera.fov_deg) / 2.0)
    if abs(tan_half - 1.0) < 1e-12:
        tan_half = 1.0

    fx, fy = DIR_TABLE[heading_index(pose.heading_deg)]
    lx, ly = -fy, fx  # unit left vector

    # Planar ray per column: p(s) = pos + s * (f + x_ndc * left). Because
    # left is orthogonal to f, the parameter s equals z-depth.
    x_ndc = (1.0 - (2.0 * np.arange(w_px) + 1.0) / w_px) * tan_half
    dx = fx + x_ndc * lx
    dy = fy + x_ndc * ly

    bw, bh = world.bounds
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = np.where(dx > 0, (bw - pose.x) / dx, np.where(dx < 0, -pose.x / dx, np.inf))
        sy = np.where(dy > 0, (bh - pose.y) / dy, np.where(dy < 0, -pose.y / dy, np.inf))
    s_wall = np.minimum(sx, sy)

    col_z = s_wall.copy()
    col_label = np.full(w_px, WALL_ID, dtype=np.int32)
    col_rgb = np.tile(np.array(WALL_RGB, dtype=np.float64), (w_px, 1))

    if world.obstacles:
        x0 = np.array([o.x0 for o in world.obstacles])[:, None]
        x1 = np.array([o.x1 for o in world.obstacles])[:, None]
        y0 = np.array([o.y0 for o in world.obstacles])[:, None]
        y1 = np.array([o.y1 for o in world.obstacles])[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            tx_a = (x0 - pose.x) / dx[None, :]
            tx_b = (x1 - pose.x) / dx[None, :]
            ty_a = (y0 - pose.y) / dy[None, :]
            ty_b = (y1 - pose.y) / dy[None, :]
        tx_min, tx_max = np.minimum(tx_a, tx_b), np.maximum(tx_a, tx_b)
        ty_min, ty_max = np.minimum(ty_a, ty_b), np.maximum(ty_a, ty_b)
        # Degenerate slabs when a ray runs parallel to an axis.
        para_x = dx[None, :] == 0.0
        inside_x = (x0 <= pose.x) & (pose.x <= x1)
        tx_min = np.where(para_x, np.where(inside_x, -np.inf, np.inf), tx_min)
        tx_max = np.where(para_x, np.where(inside_x, np.inf, -np.inf), tx_max)
        para_y = dy[None, :] == 0.0
        inside_y = (y0 <= pose.y) & (pose.y <= y1)
        ty_min = np.where(para_y, np.where(inside_y, -np.inf, np.inf), ty_min)
        ty_max = np.where(para_y, np.where(inside_y, np.inf, -np.inf), ty_max)

        t_near = np.maximum(tx_min, ty_min)
        t_far = np.minimum(tx_max, ty_max)
        hit = (t_near <= t_far) & (t_near > 1e-9)
        t_near = np.where(hit, t_near, np.inf)
        best = np.argmin(t_near, axis=0)
        best_t = t_near[best, np.arange(w_px)]
        closer = best_t < col_z
        col_z = np.where(closer, best_t, col_z)
        labels = np.array([o.label_id for o in world.obstacles], dtype=np.int32)
        colors = np.array([o.color for o in world.obstacles], dtype=np.float64)
        col_label = np.where(closer, labels[best], col_label)
        col_rgb = np.where(closer[:, None], colors[best], col_rgb)

    # Vertical split per column from the projected wall span.
    y_ndc = (1.0 - (2.0 * np.arange(h_px) + 1.0) / h_px) * tan_half * (h_px / w_px)
    y_top = (WALL_HEIGHT - camera.camera_height) / col_z  # positive
    y_bot = -camera.camera_height / col_z  # negative
    yy = y_ndc[:, None]
    ceiling = yy > y_top[None, :]
    floor = yy < y_bot[None, :]

    with np.errstate(divide="ignore", invalid="ignore"):
        z_ceiling = (WALL_HEIGHT - camera.camera_height) / yy
        z_floor = camera.camera_height / -yy
    depth = np.where(ceiling, z_ceiling, np.where(floor, z_floor, col_z[None, :]))
    depth = np.minimum(depth, camera.max_range)

    seg = np.where(
        ceiling,
        np.int32(CEILING_ID),
        np.where(floor, np.int32(FLOOR_ID), col_label[None, :]),
    ).astype(np.int32)

    base = np.empty((h_px, w_px, 3), dtype=np.float64)
    base[:] = col_rgb[None, :, :]
    base[ceiling] = CEILING_RGB
    base[floor] = FLOOR_RGB
    rgb = np.floor(base * _shade(depth)[:, :, None] + 0.5).astype(np.uint8)

    return Frame(
        rgb=rgb,
        depth=depth.astype(np.float32),
        segmentation=seg,
        label_table=dict(world.label_table),
    )
