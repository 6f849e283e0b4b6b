#!/usr/bin/env python3
"""Regenerate the frozen test fixtures under tests/fixtures.

Deterministic: running this twice produces byte-identical files. The golden
observation files are locked by the test suite; regenerate only when the
encoding contract itself changes, and expect golden-comparison tests to flag
every byte that moved.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from solnav.core import GridConfig, Pose  # noqa: E402
from solnav.dataset import build_samples, write_samples  # noqa: E402
from solnav.encoder import encode_frame  # noqa: E402
from solnav.frameio import write_frame_dir  # noqa: E402
from solnav.history import HistoryBuffer, build_sequence  # noqa: E402
from solnav.prompt import PromptParts, build_prompt, default_system_text  # noqa: E402
from solnav.render import render  # noqa: E402
from solnav.sim import generate_episode, generate_world  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"

FRAME_SPECS = (
    ("frame_seed7_start", 7, "corridor", 6),
    ("frame_seed11_rooms", 11, "rooms", 6),
    ("frame_seed13_cluttered", 13, "cluttered", 4),
)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, seed, difficulty, grid_n in FRAME_SPECS:
        episode = generate_episode(seed, difficulty)
        frame = episode.frames[0]
        write_frame_dir(frame, FIXTURES / name)
        obs = encode_frame(frame, grid_n)
        golden = FIXTURES / f"golden_{name}_n{grid_n}.txt"
        golden.write_text(obs.text() + "\n", encoding="utf-8", newline="\n")
        print(f"wrote {name} (+ golden, n={grid_n})")

    episode = generate_episode(7, "corridor")
    frame = episode.frames[0]
    obs_nodepth = encode_frame(frame, 6, use_depth=False)
    (FIXTURES / "golden_frame_seed7_start_n6_nodepth.txt").write_text(
        obs_nodepth.text() + "\n", encoding="utf-8", newline="\n"
    )

    buffer = HistoryBuffer(GridConfig())
    sequence = build_sequence(buffer, frame)
    prompt = build_prompt(
        PromptParts(default_system_text(4), sequence, "go to the door", 4)
    )
    (FIXTURES / "prompt_minimal.txt").write_text(prompt + "\n", encoding="utf-8", newline="\n")

    samples = build_samples(episode, GridConfig(), n_actions=4)
    write_samples(samples, FIXTURES / "samples_seed7.jsonl")
    print(f"wrote prompt_minimal.txt and samples_seed7.jsonl ({len(samples)} samples)")


if __name__ == "__main__":
    main()
