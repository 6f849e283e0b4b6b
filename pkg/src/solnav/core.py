"""Core value types: actions, poses, frames, and the grid configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Discrete action vocabulary. Every trajectory is a sequence of these ids.
STOP = 0
TURN_LEFT = 1
TURN_RIGHT = 2
FORWARD = 3

ACTIONS = (STOP, TURN_LEFT, TURN_RIGHT, FORWARD)

TURN_DEGREES = 15.0
FORWARD_METERS = 0.25

_ACTION_NAMES = {
    STOP: "stop",
    TURN_LEFT: "turn_left_15",
    TURN_RIGHT: "turn_right_15",
    FORWARD: "forward_25cm",
}
_NAME_TO_ACTION = {name: aid for aid, name in _ACTION_NAMES.items()}


def check_action(action: int) -> int:
    """Validate an action id and return it."""
    if action not in _ACTION_NAMES:
        raise ValueError(f"invalid action id {action!r}; expected one of {sorted(_ACTION_NAMES)}")
    return int(action)


def action_name(action: int) -> str:
    """Stable display name for an action id."""
    return _ACTION_NAMES[check_action(action)]


def parse_action(name: str) -> int:
    """Inverse of action_name."""
    try:
        return _NAME_TO_ACTION[name]
    except KeyError:
        raise ValueError(f"unknown action name {name!r}") from None


def apply_stop_suffix(actions) -> tuple[int, ...]:
    """Force every action after the first stop to also be stop."""
    out = []
    seen_stop = False
    for a in actions:
        check_action(a)
        if seen_stop:
            out.append(STOP)
        else:
            out.append(int(a))
            seen_stop = a == STOP
    return tuple(out)


def is_stop_suffixed(actions) -> bool:
    """True when no non-stop action follows a stop."""
    return tuple(actions) == apply_stop_suffix(actions)


@dataclass(frozen=True)
class GridConfig:
    """Grid resolutions and history caps for observation encoding.

    n_curr/n_short/n_long are the grid sizes used for the current frame,
    recent history, and older history. count_short/count_long cap how many
    history frames appear at each resolution. The use_* switches support
    ablations and only affect serialization and sequence assembly.
    """

    n_curr: int = 6
    n_short: int = 4
    n_long: int = 2
    count_short: int = 2
    count_long: int = 16
    use_depth: bool = True
    use_history: bool = True

    def __post_init__(self):
        for name in ("n_curr", "n_short", "n_long"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        # coarser grids for older history
        if not (self.n_curr >= self.n_short >= self.n_long):
            raise ValueError(
                "grid sizes must satisfy n_curr >= n_short >= n_long, got "
                f"{self.n_curr}/{self.n_short}/{self.n_long}"
            )
        if self.count_short < 0 or self.count_long < 0:
            raise ValueError("history counts must be >= 0")


@dataclass(frozen=True)
class Pose:
    """Planar agent pose. heading_deg is measured CCW from the +x axis."""

    x: float
    y: float
    heading_deg: float

    def normalized(self) -> "Pose":
        return Pose(self.x, self.y, self.heading_deg % 360.0)

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB-D observation with per-pixel semantic labels.

    Arrays are locked read-only on construction; treat frames as values.
    """

    rgb: np.ndarray
    depth: np.ndarray
    segmentation: np.ndarray
    label_table: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        rgb, depth, seg = self.rgb, self.depth, self.segmentation
        if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
            raise ValueError(f"rgb must be (H, W, 3) uint8, got {rgb.shape} {rgb.dtype}")
        hw = rgb.shape[:2]
        if depth.shape != hw:
            raise ValueError(f"depth shape {depth.shape} does not match rgb {hw}")
        if seg.shape != hw:
            raise ValueError(f"segmentation shape {seg.shape} does not match rgb {hw}")
        if not np.issubdtype(depth.dtype, np.floating):
            raise ValueError(f"depth must be floating point, got {depth.dtype}")
        if not np.issubdtype(seg.dtype, np.integer):
            raise ValueError(f"segmentation must be integer, got {seg.dtype}")
        present = np.unique(seg)
        missing = [int(i) for i in present if int(i) not in self.label_table]
        if missing:
            raise ValueError(f"segmentation ids {missing} missing from label_table")
        for arr in (rgb, depth, seg):
            arr.flags.writeable = False

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]
