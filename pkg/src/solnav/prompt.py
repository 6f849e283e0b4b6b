"""Prompt assembly.

A prompt has four sections separated by blank lines: the system block, the
observation blocks (oldest first, current last), the instruction line, and
the answer cue. Observation headers carry the relative timestep and grid
size; the current frame is marked explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoder import StructuredObservation
from .history import ObservationSequence

# Bump when the wording below changes; prompts are part of the data contract.
SYSTEM_TEXT_VERSION = 1

_SYSTEM_TEMPLATE = """\
You control a wheeled robot navigating an indoor scene.
Each observation below is a grid of cells, one cell per line, written as
[row,col]: depth=<meters>, semantic=<category>, color=<name>.
Rows count from the top of the image, columns from the left.
Older observations come first; the final observation is the current view.
Available actions:
0: stop
1: turn left 15 degrees
2: turn right 15 degrees
3: move forward 25 cm
Follow the instruction and stop at the goal.
Reply with exactly {n} actions as a bracketed list of integers, for example
[3, 3, 1, 0]. After the first 0 every remaining action must be 0."""


def default_system_text(n_actions: int = 4) -> str:
    """Canonical system block: action meanings, objective, output format."""
    if n_actions < 1:
        raise ValueError("n_actions must be >= 1")
    return _SYSTEM_TEMPLATE.format(n=n_actions)


def observation_header(obs: StructuredObservation) -> str:
    n = obs.grid_n
    if obs.timestep == 0:
        return f"Observation t-0 (current, {n}x{n} grid):"
    return f"Observation t-{-obs.timestep} ({n}x{n} grid):"


@dataclass(frozen=True)
class PromptParts:
    """Everything build_prompt needs to produce the final string."""

    system_text: str
    sequence: ObservationSequence
    instruction: str
    n_actions: int = 4


def build_prompt(parts: PromptParts) -> str:
    """Assemble the prompt string. UTF-8 text, LF newlines, no trailing newline."""
    if not parts.system_text.strip():
        raise ValueError("system text is empty")
    if not parts.instruction.strip():
        raise ValueError("instruction is empty")
    if parts.n_actions < 1:
        raise ValueError("n_actions must be >= 1")
    blocks = []
    for obs in parts.sequence.entries:
        blocks.append(observation_header(obs))
        blocks.extend(obs.lines())
    sections = (
        parts.system_text.rstrip("\n"),
        "\n".join(blocks),
        f"Instruction: {parts.instruction}",
        f"Predict the next {parts.n_actions} actions:",
    )
    return "\n\n".join(sections)
