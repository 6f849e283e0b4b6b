"""Navigation metrics and the canonical metrics records file.

The records file is a line-oriented text format written with fixed 6-decimal
float fields so independent implementations can produce byte-identical
output. Floats are rendered with Python's %.6f (exact binary value, correct
rounding, ties to even); the summary line is computed from the parsed-back
rounded record values, never from unrounded internals, so any writer that
emits the same records emits the same summary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

RECORDS_HEADER = "# solnav metrics v1"
DEFAULT_RADIUS = 3.0

_RECORD_KEYS = (
    "episode",
    "ne",
    "success",
    "oracle_success",
    "spl",
    "steps",
    "path_length",
    "shortest_path",
    "stopped",
    "final_x",
    "final_y",
    "goal_x",
    "goal_y",
)
_FLOAT_KEYS = {"ne", "spl", "path_length", "shortest_path", "final_x", "final_y", "goal_x", "goal_y"}
_FLAG_KEYS = {"success", "oracle_success", "stopped"}
_SUMMARY_KEYS = ("episodes", "sr", "oracle_sr", "spl", "ne")


@dataclass(frozen=True)
class EpisodeResult:
    """Outcome of one executed episode, before any rounding."""

    episode_id: str
    goal: tuple[float, float]
    final: tuple[float, float]
    stopped: bool
    steps: int
    path_length: float
    shortest_path_length: float
    min_dist: float

    def __post_init__(self) -> None:
        if not self.episode_id or any(c.isspace() for c in self.episode_id):
            raise ValueError(f"episode_id must be non-empty without whitespace: {self.episode_id!r}")
        if self.shortest_path_length <= 0.0:
            raise ValueError("shortest_path_length must be positive")
        if self.steps < 0 or self.path_length < 0.0 or self.min_dist < 0.0:
            raise ValueError("steps, path_length, and min_dist must be non-negative")

    @classmethod
    def from_trajectory(
        cls,
        episode_id: str,
        trajectory,
        goal: tuple[float, float],
        shortest_path_length: float,
        stopped: bool,
    ) -> "EpisodeResult":
        """Build a result from the ordered position list, start first."""
        points = [(float(x), float(y)) for x, y in trajectory]
        if not points:
            raise ValueError("trajectory must be non-empty")
        path_length = sum(math.dist(a, b) for a, b in zip(points, points[1:]))
        return cls(
            episode_id=episode_id,
            goal=(float(goal[0]), float(goal[1])),
            final=points[-1],
            stopped=stopped,
            steps=len(points) - 1,
            path_length=path_length,
            shortest_path_length=shortest_path_length,
            min_dist=min(math.dist(p, goal) for p in points),
        )


def navigation_error(final: tuple[float, float], goal: tuple[float, float]) -> float:
    return math.dist(final, goal)


def is_success(result: EpisodeResult, radius: float) -> bool:
    """Stopped within the radius; running out of steps is never a success."""
    return result.stopped and navigation_error(result.final, result.goal) <= radius


def is_oracle_success(result: EpisodeResult, radius: float) -> bool:
    """Whether the trajectory ever came within the radius."""
    return result.min_dist <= radius


def spl_term(result: EpisodeResult, radius: float) -> float:
    """Success weighted by shortest-path length over executed length."""
    if not is_success(result, radius):
        return 0.0
    shortest = result.shortest_path_length
    return shortest / max(result.path_length, shortest)


def aggregate(results, radius: float = DEFAULT_RADIUS) -> dict[str, float]:
    """Unrounded metric means over a result list."""
    results = list(results)
    n = len(results)
    if n == 0:
        return {"episodes": 0, "sr": 0.0, "oracle_sr": 0.0, "spl": 0.0, "ne": 0.0}
    return {
        "episodes": n,
        "sr": sum(1.0 for r in results if is_success(r, radius)) / n,
        "oracle_sr": sum(1.0 for r in results if is_oracle_success(r, radius)) / n,
        "spl": sum(spl_term(r, radius) for r in results) / n,
        "ne": sum(navigation_error(r.final, r.goal) for r in results) / n,
    }


def _fmt6(value: float) -> str:
    out = f"{float(value):.6f}"
    return "0.000000" if out == "-0.000000" else out


def record_line(result: EpisodeResult, radius: float) -> str:
    ne = navigation_error(result.final, result.goal)
    return (
        f"episode={result.episode_id}"
        f" ne={_fmt6(ne)}"
        f" success={int(is_success(result, radius))}"
        f" oracle_success={int(is_oracle_success(result, radius))}"
        f" spl={_fmt6(spl_term(result, radius))}"
        f" steps={result.steps}"
        f" path_length={_fmt6(result.path_length)}"
        f" shortest_path={_fmt6(result.shortest_path_length)}"
        f" stopped={int(result.stopped)}"
        f" final_x={_fmt6(result.final[0])}"
        f" final_y={_fmt6(result.final[1])}"
        f" goal_x={_fmt6(result.goal[0])}"
        f" goal_y={_fmt6(result.goal[1])}"
    )


def summary_line(records: list[dict]) -> str:
    """Summary over already-rounded record values (the parsed-back floats)."""
    n = len(records)
    if n == 0:
        sr = osr = spl = ne = 0.0
    else:
        sr = sum(r["success"] for r in records) / n
        osr = sum(r["oracle_success"] for r in records) / n
        spl = sum(r["spl"] for r in records) / n
        ne = sum(r["ne"] for r in records) / n
    return (
        f"summary episodes={n} sr={_fmt6(sr)} oracle_sr={_fmt6(osr)}"
        f" spl={_fmt6(spl)} ne={_fmt6(ne)}"
    )


def _parse_fields(line: str, expected_keys, line_no: int) -> dict:
    parts = line.split(" ")
    prefix = []
    if parts and "=" not in parts[0]:
        prefix = [parts.pop(0)]
    keys = []
    out = {}
    for part in parts:
        if "=" not in part:
            raise ValueError(f"line {line_no}: malformed field {part!r}")
        key, value = part.split("=", 1)
        keys.append(key)
        out[key] = value
    if tuple(keys) != tuple(expected_keys):
        raise ValueError(f"line {line_no}: expected fields {expected_keys}, got {tuple(keys)}")
    out["_prefix"] = prefix
    return out


def parse_record_line(line: str, line_no: int = 0) -> dict:
    raw = _parse_fields(line, _RECORD_KEYS, line_no)
    if raw["_prefix"]:
        raise ValueError(f"line {line_no}: unexpected prefix {raw['_prefix'][0]!r}")
    record: dict = {"episode": raw["episode"]}
    for key in _RECORD_KEYS[1:]:
        text = raw[key]
        if key in _FLAG_KEYS:
            if text not in ("0", "1"):
                raise ValueError(f"line {line_no}: {key} must be 0 or 1, got {text!r}")
            record[key] = int(text)
        elif key in _FLOAT_KEYS:
            if _fmt6(float(text)) != text:
                raise ValueError(f"line {line_no}: {key}={text!r} is not in canonical form")
            record[key] = float(text)
        else:
            if not text.isdigit():
                raise ValueError(f"line {line_no}: {key} must be a non-negative int, got {text!r}")
            record[key] = int(text)
    return record


def render_records(results, radius: float) -> str:
    """Full canonical file content for a result list."""
    lines = [RECORDS_HEADER, f"radius={_fmt6(radius)}"]
    records = []
    for result in results:
        line = record_line(result, radius)
        lines.append(line)
        records.append(parse_record_line(line))
    lines.append(summary_line(records))
    return "\n".join(lines) + "\n"


def write_records(path, results, radius: float) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_records(results, radius))


def parse_records_text(text: str) -> tuple[float, list[dict], dict]:
    """Strictly parse a records file; returns (radius, records, summary)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ValueError("records file must end with a newline")
    if len(lines) < 3:
        raise ValueError("records file must have a header, a radius line, and a summary")
    if lines[0] != RECORDS_HEADER:
        raise ValueError(f"bad header {lines[0]!r}; expected {RECORDS_HEADER!r}")
    if not lines[1].startswith("radius="):
        raise ValueError(f"line 2 must be the radius, got {lines[1]!r}")
    radius_text = lines[1][len("radius=") :]
    if _fmt6(float(radius_text)) != radius_text:
        raise ValueError(f"radius {radius_text!r} is not in canonical form")
    radius = float(radius_text)
    records = [parse_record_line(line, i + 3) for i, line in enumerate(lines[2:-1])]
    summary_raw = _parse_fields(lines[-1], _SUMMARY_KEYS, len(lines))
    if summary_raw["_prefix"] != ["summary"]:
        raise ValueError("last line must be the summary")
    summary = {"episodes": int(summary_raw["episodes"])}
    for key in _SUMMARY_KEYS[1:]:
        text = summary_raw[key]
        if _fmt6(float(text)) != text:
            raise ValueError(f"summary {key}={text!r} is not in canonical form")
        summary[key] = float(text)
    return radius, records, summary


def read_records(path) -> tuple[float, list[dict], dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_records_text(fh.read())


def validate_records_text(text: str) -> tuple[float, list[dict], dict]:
    """Parse, re-serialize, and byte-compare; summary must match the records."""
    radius, records, summary = parse_records_text(text)
    lines = [RECORDS_HEADER, f"radius={_fmt6(radius)}"]
    for record in records:
        line = " ".join(
            f"{key}={record[key] if key == 'episode' else _render_field(key, record[key])}"
            for key in _RECORD_KEYS
        )
        lines.append(line)
    lines.append(summary_line(records))
    canonical = "\n".join(lines) + "\n"
    if canonical != text:
        for i, (a, b) in enumerate(zip(canonical.split("\n"), text.split("\n"))):
            if a != b:
                raise ValueError(f"line {i + 1} is not canonical:\n  expected: {a!r}\n  found:    {b!r}")
        raise ValueError("records file is not canonical (length mismatch)")
    return radius, records, summary


def _render_field(key: str, value) -> str:
    if key in _FLOAT_KEYS:
        return _fmt6(value)
    return str(int(value))
