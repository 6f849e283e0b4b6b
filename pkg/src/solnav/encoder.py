"""Grid-structured text encoding of RGB-D segmentation frames.

A frame is partitioned into an n x n grid of pixel rectangles. Each cell is
summarized by three tokens: mean depth over valid pixels (one decimal), the
majority semantic label, and the palette name of the mean RGB color. Cells
serialize one per line as

    [row,col]: depth=<d>, semantic=<s>, color=<c>

with 1-based row/col indices, row-major order.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .core import Frame

# Fixed 12-name palette. Achromatic bands first, then hue bins.
PALETTE = (
    "black",
    "white",
    "light_gray",
    "gray",
    "red",
    "orange",
    "yellow",
    "green",
    "cyan",
    "blue",
    "purple",
    "pink",
)

# Upper hue bound (degrees) -> name; scanned in order, wraps back to red.
HUE_BINS = (
    (15.0, "red"),
    (45.0, "orange"),
    (70.0, "yellow"),
    (160.0, "green"),
    (200.0, "cyan"),
    (260.0, "blue"),
    (290.0, "purple"),
    (345.0, "pink"),
    (360.0, "red"),
)

BLACK_V_MAX = 0.20
ACHROMATIC_S_MAX = 0.15
WHITE_V_MIN = 0.85
LIGHT_GRAY_V_MIN = 0.60


def classify_color(r: float, g: float, b: float) -> str:
    """Map one RGB triple (0..255 scale) to a palette name.

    Total by construction: dark colors are black, low-saturation colors fall
    into white/light_gray/gray bands by value, everything else lands in a hue
    bin. The bands partition the HSV cube exactly once.
    """
    h, s, v = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)
    if v < BLACK_V_MAX:
        return "black"
    if s < ACHROMATIC_S_MAX:
        if v >= WHITE_V_MIN:
            return "white"
        if v >= LIGHT_GRAY_V_MIN:
            return "light_gray"
        return "gray"
    hue = h * 360.0
    for bound, name in HUE_BINS:
        if hue < bound:
            return name
    return "red"


def partition_grid(height: int, width: int, n: int) -> list[tuple[int, int, int, int]]:
    """Split a height x width image into n x n rectangles.

    Cell (i, j), 1-based, spans rows [floor((i-1)*H/n), floor(i*H/n)) and the
    analogous column range, so the rectangles tile the image exactly. Returns
    (r0, r1, c0, c1) tuples in row-major order.
    """
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    if height < n or width < n:
        raise ValueError(
            f"image {height}x{width} too small for a {n}x{n} grid; "
            "every cell needs at least one pixel"
        )
    row_bounds = [i * height // n for i in range(n + 1)]
    col_bounds = [j * width // n for j in range(n + 1)]
    rects = []
    for i in range(n):
        for j in range(n):
            rects.append((row_bounds[i], row_bounds[i + 1], col_bounds[j], col_bounds[j + 1]))
    return rects


def depth_text(depth_patch: np.ndarray) -> str:
    """Mean of valid depth pixels at one decimal, or "unknown".

    Valid pixels are finite and strictly positive. Rounding is half away
    from zero on the decimal value (2.05 -> "2.1").
    """
    values = depth_patch[np.isfinite(depth_patch) & (depth_patch > 0)]
    if values.size == 0:
        return "unknown"
    mean = float(values.mean())
    return str(Decimal(repr(mean)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def semantic_text(seg_patch: np.ndarray, label_table: dict[int, str]) -> str:
    """Most frequent label in the patch; ties break toward the smallest id."""
    counts = np.bincount(seg_patch.ravel())
    winner = int(counts.argmax())
    return label_table.get(winner, "unknown")


def color_text(rgb_patch: np.ndarray) -> str:
    """Palette name of the patch's mean RGB color."""
    mean = rgb_patch.reshape(-1, 3).mean(axis=0)
    return classify_color(float(mean[0]), float(mean[1]), float(mean[2]))


@dataclass(frozen=True)
class CellSummary:
    """Summary tokens of one grid cell; row/col are 1-based."""

    row: int
    col: int
    depth: str
    semantic: str
    color: str


def serialize_cell(cell: CellSummary, use_depth: bool = True) -> str:
    """Render one cell line; use_depth=False drops the depth segment."""
    if use_depth:
        return f"[{cell.row},{cell.col}]: depth={cell.depth}, semantic={cell.semantic}, color={cell.color}"
    return f"[{cell.row},{cell.col}]: semantic={cell.semantic}, color={cell.color}"


@dataclass(frozen=True)
class StructuredObservation:
    """One frame encoded as an n x n grid of cell summaries.

    timestep is zero for the current frame and negative for history entries.
    cells is a row-major matrix of CellSummary objects.
    """

    timestep: int
    grid_n: int
    cells: tuple[tuple[CellSummary, ...], ...]
    include_depth: bool = True

    def __post_init__(self):
        if self.timestep > 0:
            raise ValueError("timestep must be <= 0 (0 marks the current frame)")
        if len(self.cells) != self.grid_n or any(len(r) != self.grid_n for r in self.cells):
            raise ValueError(f"cells must form a {self.grid_n}x{self.grid_n} matrix")

    def lines(self) -> list[str]:
        return [serialize_cell(c, self.include_depth) for row in self.cells for c in row]

    def text(self) -> str:
        return "\n".join(self.lines())


def summarize_cells(frame: Frame, n: int) -> tuple[tuple[CellSummary, ...], ...]:
    """Compute the n x n CellSummary matrix for a frame."""
    rects = partition_grid(frame.height, frame.width, n)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            r0, r1, c0, c1 = rects[i * n + j]
            row.append(
                CellSummary(
                    row=i + 1,
                    col=j + 1,
                    depth=depth_text(frame.depth[r0:r1, c0:c1]),
                    semantic=semantic_text(frame.segmentation[r0:r1, c0:c1], frame.label_table),
                    color=color_text(frame.rgb[r0:r1, c0:c1]),
                )
            )
        rows.append(tuple(row))
    return tuple(rows)


def encode_frame(frame: Frame, n: int, timestep: int = 0, use_depth: bool = True) -> StructuredObservation:
    """Encode one frame at resolution n with the given timestep label."""
    return StructuredObservation(
        timestep=timestep,
        grid_n=n,
        cells=summarize_cells(frame, n),
        include_depth=use_depth,
    )
