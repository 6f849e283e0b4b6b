"""Multi-resolution observation history.

A rollout accumulates one frame per executed action in a HistoryBuffer. At
prompt time the buffer is compressed: the most recent count_short frames are
encoded at n_short, older frames are uniformly subsampled (endpoints kept) to
at most count_long entries encoded at n_long, and the current frame is
encoded at n_curr. Timestep labels are offsets relative to the current frame:
history entries are negative, the current entry is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Frame, GridConfig
from .encoder import StructuredObservation, summarize_cells


@dataclass
class HistoryBuffer:
    """Ordered past frames with their absolute step indices.

    Single writer: push() appends with the next index. The buffer keeps every
    frame; compression happens at build_sequence time.
    """

    config: GridConfig
    _frames: list[tuple[int, Frame]] = field(default_factory=list)

    def push(self, frame: Frame) -> int:
        index = self.next_index
        self._frames.append((index, frame))
        return index

    @property
    def frames(self) -> list[tuple[int, Frame]]:
        return list(self._frames)

    @property
    def next_index(self) -> int:
        return self._frames[-1][0] + 1 if self._frames else 0

    def __len__(self) -> int:
        return len(self._frames)


def subsample_indices(m: int, count: int) -> list[int]:
    """Evenly spaced 0-based indices into a length-m sequence.

    Keeps both endpoints, rounds half up, and returns min(m, count) strictly
    increasing indices.
    """
    if m < 0 or count < 0:
        raise ValueError("m and count must be >= 0")
    if count == 0 or m == 0:
        return []
    if m <= count:
        return list(range(m))
    if count == 1:
        return [0]
    step = (m - 1) / (count - 1)
    return [int(i * step + 0.5) for i in range(count)]


def select_history(buffer: HistoryBuffer) -> tuple[list[tuple[int, Frame]], list[tuple[int, Frame]]]:
    """Split buffered frames into (long, short) selections, each chronological.

    short: the count_short most recent frames. long: the remaining older
    frames subsampled to at most count_long entries.
    """
    cfg = buffer.config
    frames = buffer.frames
    n_short = min(cfg.count_short, len(frames))
    short = frames[len(frames) - n_short :]
    older = frames[: len(frames) - n_short]
    long = [older[i] for i in subsample_indices(len(older), cfg.count_long)]
    return long, short


@dataclass(frozen=True)
class ObservationSequence:
    """Chronological encoded observations ending with the current frame."""

    entries: tuple[StructuredObservation, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("sequence must contain at least the current observation")
        if self.entries[-1].timestep != 0:
            raise ValueError("last entry must be the current observation (timestep 0)")
        steps = [e.timestep for e in self.entries]
        if steps != sorted(steps) or len(set(steps)) != len(steps):
            raise ValueError("entries must be chronological with distinct timesteps")


def build_sequence(
    buffer: HistoryBuffer,
    current: Frame,
    cells_cache: dict | None = None,
) -> ObservationSequence:
    """Compress the buffer and append the current frame.

    cells_cache, when given, memoizes cell matrices keyed by
    (absolute index, grid_n); rollouts and dataset builds re-encode the same
    frame under many prompts, so the cache collapses that work.
    """
    cfg = buffer.config
    now = buffer.next_index

    def encode(frame: Frame, index: int, n: int) -> StructuredObservation:
        key = (index, n)
        if cells_cache is not None and key in cells_cache:
            cells = cells_cache[key]
        else:
            cells = summarize_cells(frame, n)
            if cells_cache is not None:
                cells_cache[key] = cells
        return StructuredObservation(
            timestep=index - now,
            grid_n=n,
            cells=cells,
            include_depth=cfg.use_depth,
        )

    entries: list[StructuredObservation] = []
    if cfg.use_history:
        long, short = select_history(buffer)
        entries.extend(encode(f, i, cfg.n_long) for i, f in long)
        entries.extend(encode(f, i, cfg.n_short) for i, f in short)
    entries.append(encode(current, now, cfg.n_curr))
    return ObservationSequence(entries=tuple(entries))
