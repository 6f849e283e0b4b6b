"""Closed-loop episode execution shared by evaluation paths.

The loop renders a frame before every executed action so the history stream
the policy sees matches the training distribution exactly, and re-prompts
once per action block: predict n_a actions, execute them all, repeat until
the policy emits stop or the step cap is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import GridConfig, Pose, STOP, check_action
from .history import HistoryBuffer, build_sequence
from .metrics import EpisodeResult
from .prompt import PromptParts, build_prompt, default_system_text
from .render import render
from .world import CameraModel, World, step


@dataclass(frozen=True)
class RolloutOutcome:
    result: EpisodeResult
    executed: tuple[int, ...]
    prompts: tuple[str, ...]


def run_episode(
    world: World,
    start: Pose,
    goal: tuple[float, float],
    instruction: str,
    episode_id: str,
    shortest_path_length: float,
    decide: Callable[[str], list[int]],
    config: GridConfig = GridConfig(),
    n_actions: int = 4,
    step_cap: int = 200,
    camera: CameraModel = CameraModel(),
    system_text: str | None = None,
    collect_prompts: bool = False,
) -> RolloutOutcome:
    """Run one episode under a prompt->block policy and score it.

    `decide` maps a prompt to a block of n_actions action ids. The block is
    executed in order; a stop ends the episode, and a blocked forward leaves
    the pose unchanged but still consumes a step.
    """
    if n_actions < 1:
        raise ValueError(f"n_actions must be >= 1, got {n_actions}")
    if step_cap < 1:
        raise ValueError(f"step_cap must be >= 1, got {step_cap}")
    system = default_system_text(n_actions) if system_text is None else system_text
    buffer = HistoryBuffer(config)
    cells_cache: dict = {}
    pose = start
    min_dist = math.dist((pose.x, pose.y), goal)
    path_length = 0.0
    steps = 0
    stopped = False
    executed: list[int] = []
    prompts: list[str] = []
    pending: list[int] = []
    while True:
        frame = render(world, pose, camera)
        if not pending:
            sequence = build_sequence(buffer, frame, cells_cache)
            prompt = build_prompt(PromptParts(system, sequence, instruction, n_actions))
            if collect_prompts:
                prompts.append(prompt)
            block = [check_action(a) for a in decide(prompt)]
            if len(block) != n_actions:
                raise ValueError(f"policy returned {len(block)} actions, expected {n_actions}")
            pending = block
        action = pending.pop(0)
        executed.append(action)
        if action == STOP:
            stopped = True
            break
        buffer.push(frame)
        before = pose
        pose = step(world, pose, action)
        path_length += math.dist((before.x, before.y), (pose.x, pose.y))
        min_dist = min(min_dist, math.dist((pose.x, pose.y), goal))
        steps += 1
        if steps >= step_cap:
            break
    result = EpisodeResult(
        episode_id=episode_id,
        goal=goal,
        final=(pose.x, pose.y),
        stopped=stopped,
        steps=steps,
        path_length=path_length,
        shortest_path_length=shortest_path_length,
        min_dist=min_dist,
    )
    return RolloutOutcome(result=result, executed=tuple(executed), prompts=tuple(prompts))
