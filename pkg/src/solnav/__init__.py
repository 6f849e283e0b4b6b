"""Grid-structured text navigation: observation encoding, simulation, and
action-chunk policy training for instruction-following agents."""

from .core import (
    ACTIONS,
    FORWARD,
    STOP,
    TURN_LEFT,
    TURN_RIGHT,
    Frame,
    GridConfig,
    Pose,
    apply_stop_suffix,
)
from .dataset import Episode, TrainingSample, build_samples, chunk_actions
from .encoder import (
    PALETTE,
    StructuredObservation,
    classify_color,
    encode_frame,
    partition_grid,
)
from .history import HistoryBuffer, build_sequence, select_history, subsample_indices
from .metrics import EpisodeResult, aggregate, navigation_error, spl_term
from .model import ActionChunkPredictor, PromptHasher
from .planner import geodesic_length, oracle_actions, reachable_cells
from .prompt import PromptParts, build_prompt, default_system_text
from .render import render
from .rollout import RolloutOutcome, run_episode
from .sim import generate_episode, generate_instruction, generate_world
from .world import CameraModel, Obstacle, World, step

__version__ = "0.1.0"

__all__ = [
    "ACTIONS",
    "FORWARD",
    "STOP",
    "TURN_LEFT",
    "TURN_RIGHT",
    "ActionChunkPredictor",
    "CameraModel",
    "Episode",
    "EpisodeResult",
    "Frame",
    "GridConfig",
    "HistoryBuffer",
    "Obstacle",
    "PALETTE",
    "Pose",
    "PromptHasher",
    "PromptParts",
    "RolloutOutcome",
    "StructuredObservation",
    "TrainingSample",
    "World",
    "aggregate",
    "apply_stop_suffix",
    "build_prompt",
    "build_samples",
    "build_sequence",
    "chunk_actions",
    "classify_color",
    "default_system_text",
    "encode_frame",
    "generate_episode",
    "generate_instruction",
    "generate_world",
    "geodesic_length",
    "navigation_error",
    "oracle_actions",
    "partition_grid",
    "reachable_cells",
    "render",
    "run_episode",
    "select_history",
    "spl_term",
    "step",
    "subsample_indices",
    "__version__",
]
