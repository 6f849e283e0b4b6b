#!/usr/bin/env python3
"""Regenerate the plm-bridge test fixtures under plm-bridge/fixtures.

The bridge consumes episodes and prompts exported by this package and must
reproduce the reporter's records byte for byte, so its fixtures are frozen
outputs of the primary pipeline: a small corridor suite (episode.meta and
scene.txt only, frames are not part of the bridge contract), the recorded
prompts, reference records for an oracle-replay policy and a stop-only
policy, and a table of floats with their fixed 6-decimal renderings.

Deterministic: running this twice produces byte-identical files.
"""

from __future__ import annotations

import random
import shutil
import struct
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from solnav.core import GridConfig  # noqa: E402
from solnav.dataset import build_samples, chunk_actions, write_samples  # noqa: E402
from solnav.metrics import write_records  # noqa: E402
from solnav.rollout import run_episode  # noqa: E402
from solnav.sim import generate_episode, generate_world  # noqa: E402
from solnav.world import write_scene  # noqa: E402

FIXTURES = ROOT / "plm-bridge" / "fixtures"
SUITE_SEEDS = (0, 1, 2, 3, 4)
RADIUS = 1.0
STEP_CAP = 200


def fmt6(value: float) -> str:
    out = f"{float(value):.6f}"
    return "0.000000" if out == "-0.000000" else out


def write_meta(episode, directory: Path) -> None:
    lines = [
        f"id={episode.episode_id}",
        f"instruction={episode.instruction}",
        f"start_x={episode.start.x!r}",
        f"start_y={episode.start.y!r}",
        f"start_heading={episode.start.heading_deg!r}",
        f"goal_x={episode.goal[0]!r}",
        f"goal_y={episode.goal[1]!r}",
        f"shortest_path_length={episode.shortest_path_length!r}",
        "actions=" + " ".join(str(a) for a in episode.actions),
    ]
    (directory / "episode.meta").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def replay_decide(blocks):
    queue = [list(b) for b in blocks]

    def decide(prompt: str):
        return queue.pop(0) if queue else [0, 0, 0, 0]

    return decide


def build_suite() -> None:
    suite_dir = FIXTURES / "corridor"
    if suite_dir.exists():
        shutil.rmtree(suite_dir)
    all_samples = []
    oracle_results = []
    stop_results = []
    for seed in SUITE_SEEDS:
        episode = generate_episode(seed, "corridor")
        world = generate_world(seed, "corridor")
        episode_dir = suite_dir / episode.episode_id
        episode_dir.mkdir(parents=True)
        write_meta(episode, episode_dir)
        write_scene(world, episode_dir / "scene.txt")
        all_samples.extend(build_samples(episode, GridConfig()))

        common = dict(
            world=world,
            start=episode.start,
            goal=episode.goal,
            instruction=episode.instruction,
            episode_id=episode.episode_id,
            shortest_path_length=episode.shortest_path_length,
            step_cap=STEP_CAP,
        )
        oracle = run_episode(decide=replay_decide(chunk_actions(episode.actions)), **common)
        oracle_results.append(oracle.result)
        stop = run_episode(decide=lambda prompt: [0, 0, 0, 0], **common)
        stop_results.append(stop.result)

    write_samples(all_samples, FIXTURES / "samples.jsonl")
    write_records(FIXTURES / "golden_oracle_records.txt", oracle_results, RADIUS)
    write_records(FIXTURES / "golden_stop_records.txt", stop_results, RADIUS)
    print(f"suite: {len(SUITE_SEEDS)} episodes, {len(all_samples)} recorded prompts")


def vector_values() -> list[float]:
    values = [
        0.0,
        -0.0,
        1.0,
        -1.0,
        0.25,
        0.1,
        1 / 3,
        2 / 3,
        1 / 128,
        3 / 128,
        5 / 128,
        -3 / 128,
        5e-7,
        1.5e-7,
        2.5e-7,
        -1e-9,
        -6e-7,
        123456.789,
        2.0**53,
        2.0**60,
        -(2.0**60),
        5e-324,
        1.5,
        2.5,
        0.0000005,
        0.0000015,
    ]
    rng = random.Random(20260816)
    for _ in range(60):
        values.append(rng.uniform(-20.0, 20.0))
    for _ in range(60):
        values.append(rng.choice((-1.0, 1.0)) * 10.0 ** rng.uniform(-9.0, 9.0))
    # random bit patterns cover subnormals and awkward exponents
    count = 0
    while count < 80:
        bits = rng.getrandbits(64)
        (value,) = struct.unpack("<d", struct.pack("<Q", bits))
        if value != value or value in (float("inf"), float("-inf")):
            continue
        values.append(value)
        count += 1
    return values


def build_vectors() -> None:
    lines = [f"{value!r}\t{fmt6(value)}" for value in vector_values()]
    (FIXTURES / "fmt6_vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"fmt6 vectors: {len(lines)}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    build_suite()
    build_vectors()
    total = sum(p.stat().st_size for p in FIXTURES.rglob("*") if p.is_file())
    print(f"fixtures total: {total / 1024:.0f} KiB")


if __name__ == "__main__":
    main()
