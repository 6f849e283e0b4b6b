"""Episodes, action chunking, and training-sample serialization.

An episode pairs one frame per pre-action state with the ground-truth action
sequence. Training samples slice the trajectory into fixed-size action blocks:
sample k sees frames [0, k*n_actions) as history, the frame at k*n_actions as
the current view, and predicts block k.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .core import STOP, Frame, GridConfig, Pose, check_action
from .frameio import read_frame_dir, write_frame_dir
from .history import HistoryBuffer, build_sequence
from .prompt import PromptParts, build_prompt, default_system_text

META_NAME = "episode.meta"
FRAMES_DIR = "frames"

_META_KEYS = (
    "id",
    "instruction",
    "start_x",
    "start_y",
    "start_heading",
    "goal_x",
    "goal_y",
    "shortest_path_length",
    "actions",
)


@dataclass(frozen=True)
class Episode:
    """One recorded navigation episode.

    frames holds the observation before each action, so len(frames) equals
    len(actions) and the action list always ends with stop.
    """

    episode_id: str
    instruction: str
    frames: tuple[Frame, ...]
    actions: tuple[int, ...]
    start: Pose
    goal: tuple[float, float]
    shortest_path_length: float

    def __post_init__(self):
        if not self.actions:
            raise ValueError("episode needs at least one action")
        for a in self.actions:
            check_action(a)
        if self.actions[-1] != STOP:
            raise ValueError("action sequence must end with stop")
        if len(self.frames) != len(self.actions):
            raise ValueError(
                f"expected one frame per action, got {len(self.frames)} frames "
                f"for {len(self.actions)} actions"
            )
        if self.shortest_path_length <= 0:
            raise ValueError("shortest_path_length must be positive")


@dataclass(frozen=True)
class TrainingSample:
    prompt: str
    target: tuple[int, ...]
    episode_id: str
    step_index: int


def chunk_actions(actions, n_actions: int = 4) -> list[tuple[int, ...]]:
    """Split an action sequence into ceil(T / n_actions) fixed-size blocks.

    The final block is padded with stops. Padding therefore only ever appears
    in the last block.
    """
    if n_actions < 1:
        raise ValueError("n_actions must be >= 1")
    actions = [check_action(a) for a in actions]
    if not actions:
        raise ValueError("cannot chunk an empty action sequence")
    blocks = []
    for k in range(math.ceil(len(actions) / n_actions)):
        block = actions[k * n_actions : (k + 1) * n_actions]
        block += [STOP] * (n_actions - len(block))
        blocks.append(tuple(block))
    return blocks


def build_samples(episode: Episode, config: GridConfig, n_actions: int = 4) -> list[TrainingSample]:
    """Produce one TrainingSample per action block of the episode."""
    blocks = chunk_actions(episode.actions, n_actions)
    system_text = default_system_text(n_actions)
    buffer = HistoryBuffer(config)
    cache: dict = {}
    samples = []
    pushed = 0
    for k, block in enumerate(blocks):
        step_index = k * n_actions
        while pushed < step_index:
            buffer.push(episode.frames[pushed])
            pushed += 1
        sequence = build_sequence(buffer, episode.frames[step_index], cells_cache=cache)
        prompt = build_prompt(
            PromptParts(
                system_text=system_text,
                sequence=sequence,
                instruction=episode.instruction,
                n_actions=n_actions,
            )
        )
        samples.append(
            TrainingSample(
                prompt=prompt,
                target=block,
                episode_id=episode.episode_id,
                step_index=step_index,
            )
        )
    return samples


def write_samples(samples, path) -> None:
    """Write samples as JSON lines (UTF-8, LF)."""
    lines = []
    for s in samples:
        lines.append(
            json.dumps(
                {
                    "prompt": s.prompt,
                    "target": list(s.target),
                    "episode_id": s.episode_id,
                    "step_index": s.step_index,
                },
                ensure_ascii=False,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_samples(path) -> list[TrainingSample]:
    """Parse a JSONL sample file; malformed records fail with their line number."""
    samples = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {lineno}: malformed record: {exc.msg}") from None
        if not isinstance(record, dict) or set(record) != {
            "prompt",
            "target",
            "episode_id",
            "step_index",
        }:
            raise ValueError(f"{path}: line {lineno}: unexpected record keys")
        target = record["target"]
        if (
            not isinstance(record["prompt"], str)
            or not record["prompt"]
            or not isinstance(target, list)
            or not target
            or not all(isinstance(a, int) and not isinstance(a, bool) for a in target)
            or not isinstance(record["episode_id"], str)
            or not isinstance(record["step_index"], int)
        ):
            raise ValueError(f"{path}: line {lineno}: malformed record fields")
        try:
            block = tuple(check_action(a) for a in target)
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
        samples.append(
            TrainingSample(
                prompt=record["prompt"],
                target=block,
                episode_id=record["episode_id"],
                step_index=record["step_index"],
            )
        )
    return samples


def write_episode_dir(episode: Episode, directory) -> None:
    """Persist an episode: episode.meta plus one frame directory per step."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "id": episode.episode_id,
        "instruction": episode.instruction,
        "start_x": repr(episode.start.x),
        "start_y": repr(episode.start.y),
        "start_heading": repr(episode.start.heading_deg),
        "goal_x": repr(episode.goal[0]),
        "goal_y": repr(episode.goal[1]),
        "shortest_path_length": repr(episode.shortest_path_length),
        "actions": " ".join(str(a) for a in episode.actions),
    }
    lines = [f"{key}={meta[key]}" for key in _META_KEYS]
    (directory / META_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    for i, frame in enumerate(episode.frames):
        write_frame_dir(frame, directory / FRAMES_DIR / f"{i:04d}")


def read_episode_meta(path) -> dict:
    """Parse episode.meta into typed fields (no frames loaded)."""
    path = Path(path)
    raw: dict[str, str] = {}
    text = path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        raw[key] = value
    missing = [k for k in _META_KEYS if k not in raw]
    if missing:
        raise ValueError(f"{path}: missing keys {missing}")
    return {
        "id": raw["id"],
        "instruction": raw["instruction"],
        "start": Pose(float(raw["start_x"]), float(raw["start_y"]), float(raw["start_heading"])),
        "goal": (float(raw["goal_x"]), float(raw["goal_y"])),
        "shortest_path_length": float(raw["shortest_path_length"]),
        "actions": tuple(check_action(int(a)) for a in raw["actions"].split()),
    }


def read_episode_dir(directory) -> Episode:
    directory = Path(directory)
    meta = read_episode_meta(directory / META_NAME)
    frames_root = directory / FRAMES_DIR
    frame_dirs = sorted(p for p in frames_root.iterdir() if p.is_dir())
    frames = tuple(read_frame_dir(p) for p in frame_dirs)
    return Episode(
        episode_id=meta["id"],
        instruction=meta["instruction"],
        frames=frames,
        actions=meta["actions"],
        start=meta["start"],
        goal=meta["goal"],
        shortest_path_length=meta["shortest_path_length"],
    )


def list_episode_dirs(root) -> list[Path]:
    """Episode directories under root, sorted by name."""
    root = Path(root)
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / META_NAME).exists())
