"""Command-line entry point wiring the modules into reproducible workflows.

Subcommands: encode, simulate, build-dataset, train, eval, ablate, report.
Every run echoes its resolved configuration to stderr as one JSON line so a
run can be reproduced byte-exactly from its log. Artifact output goes to
stdout or to files, always UTF-8 with LF line endings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .core import GridConfig
from .dataset import (
    META_NAME,
    TrainingSample,
    build_samples,
    list_episode_dirs,
    read_episode_dir,
    read_episode_meta,
    read_samples,
    write_episode_dir,
    write_samples,
)
from .encoder import encode_frame
from .frameio import read_frame_dir
from .metrics import (
    DEFAULT_RADIUS,
    read_records,
    summary_line,
    validate_records_text,
    write_records,
)
from .model import ActionChunkPredictor
from .rollout import run_episode
from .sim import DIFFICULTIES, episode_world, generate_episode
from .world import GenerationError, NoPathError, read_scene, write_scene

SCENE_NAME = "scene.txt"

ABLATION_VARIANTS = (
    ("Lower Res.", "lower-res"),
    ("No His.", "no-history"),
    ("No Depth", "no-depth"),
    ("All Info.", "full"),
)


class CommandError(Exception):
    """User-facing failure; message printed to stderr, exit code 2."""


def resolve_input_path(path: str) -> Path:
    """Resolve a path, falling back to the SOLNAV_FIXTURES directory."""
    p = Path(path)
    if p.exists():
        return p
    fixtures = os.environ.get("SOLNAV_FIXTURES")
    if fixtures:
        candidate = Path(fixtures) / path
        if candidate.exists():
            return candidate
    return p


def _echo_config(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_") and not callable(v)}
    print(f"config: {json.dumps(resolved, sort_keys=True)}", file=sys.stderr)


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-curr", type=int, default=6, help="current observation grid size")
    parser.add_argument("--n-short", type=int, default=4, help="short-history grid size")
    parser.add_argument("--n-long", type=int, default=2, help="long-history grid size")
    parser.add_argument("--count-short", type=int, default=2, help="short-history frame count")
    parser.add_argument("--count-long", type=int, default=16, help="long-history frame budget")
    parser.add_argument("--no-depth", action="store_true", help="omit depth fields")
    parser.add_argument("--no-history", action="store_true", help="omit history observations")


def _grid_config(args: argparse.Namespace, ablate: str | None = None) -> GridConfig:
    kwargs = dict(
        n_curr=args.n_curr,
        n_short=args.n_short,
        n_long=args.n_long,
        count_short=args.count_short,
        count_long=args.count_long,
        use_depth=not args.no_depth,
        use_history=not args.no_history,
    )
    if ablate == "lower-res":
        kwargs["n_curr"] = 4
        kwargs["n_short"] = min(kwargs["n_short"], 4)
    elif ablate == "no-history":
        kwargs["use_history"] = False
    elif ablate == "no-depth":
        kwargs["use_depth"] = False
    elif ablate not in (None, "full"):
        raise CommandError(f"unknown ablation variant {ablate!r}")
    try:
        return GridConfig(**kwargs)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc


def _difficulty_for(seed: int, difficulty: str) -> str:
    if difficulty != "mixed":
        return difficulty
    return "corridor" if seed % 4 < 3 else "rooms"


def cmd_encode(args: argparse.Namespace) -> int:
    _echo_config(args)
    frame_dir = resolve_input_path(args.frame_dir)
    frame = read_frame_dir(frame_dir)
    obs = encode_frame(frame, args.n, timestep=0, use_depth=not args.no_depth)
    out = obs.text() + "\n"
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(out)
    return 0


def _simulate_one(seed: int, difficulty: str):
    return generate_episode(seed, difficulty), episode_world(seed, difficulty)


def cmd_simulate(args: argparse.Namespace) -> int:
    _echo_config(args)
    if args.count < 1:
        raise CommandError(f"--count must be >= 1, got {args.count}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = [(args.seed + i, _difficulty_for(args.seed + i, args.difficulty)) for i in range(args.count)]
    ok = 0
    failures = 0
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_simulate_one, s, d) for s, d in seeds]
            results = []
            for (s, d), fut in zip(seeds, futures):
                try:
                    results.append(fut.result())
                except (GenerationError, NoPathError) as exc:
                    results.append(exc)
    else:
        results = []
        for s, d in seeds:
            try:
                results.append(_simulate_one(s, d))
            except (GenerationError, NoPathError) as exc:
                results.append(exc)
    for (seed, difficulty), item in zip(seeds, results):
        if isinstance(item, Exception):
            print(f"seed {seed} ({difficulty}): generation failed: {item}", file=sys.stderr)
            failures += 1
            continue
        episode, world = item
        episode_dir = out_dir / episode.episode_id
        write_episode_dir(episode, episode_dir)
        write_scene(world, episode_dir / SCENE_NAME)
        ok += 1
    print(f"simulated {ok} episodes ({failures} failed) -> {out_dir}")
    return 0


def cmd_build_dataset(args: argparse.Namespace) -> int:
    _echo_config(args)
    episodes_dir = resolve_input_path(args.episodes)
    dirs = list_episode_dirs(episodes_dir)
    if not dirs:
        raise CommandError(f"no episodes found in {episodes_dir}")
    config = _grid_config(args)
    samples: list[TrainingSample] = []
    for d in dirs:
        episode = read_episode_dir(d)
        samples.extend(build_samples(episode, config, n_actions=args.na))
    write_samples(samples, args.out)
    print(f"wrote {len(samples)} samples from {len(dirs)} episodes -> {args.out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    _echo_config(args)
    samples = read_samples(resolve_input_path(args.samples))
    if not samples:
        raise CommandError("empty sample file")
    lengths = {len(s.target) for s in samples}
    if len(lengths) != 1:
        raise CommandError(f"inconsistent target lengths in samples: {sorted(lengths)}")
    n_actions = lengths.pop()
    if args.na is not None and args.na != n_actions:
        raise CommandError(f"--na {args.na} does not match sample target length {n_actions}")
    model = ActionChunkPredictor(
        n_actions=n_actions,
        dimension=args.dimension,
        hash_seed=args.hash_seed,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        l2=args.l2,
        holdout_fraction=args.holdout,
        rng_seed=args.seed,
    )
    model.fit([s.prompt for s in samples], [list(s.target) for s in samples])
    model.save(args.out)
    print(f"trained on {len(samples)} samples; holdout loss {model.holdout_loss_:.6f} -> {args.out}")
    return 0


def _load_episode_for_eval(episode_dir: Path):
    meta = read_episode_meta(episode_dir / META_NAME)
    world = read_scene(episode_dir / SCENE_NAME)
    return meta, world


_EVAL_STATE: dict = {}


def _eval_init(model_path: str, config_kwargs: dict, n_actions: int, step_cap: int) -> None:
    model = ActionChunkPredictor.load(model_path)
    _EVAL_STATE["model"] = model
    _EVAL_STATE["config"] = GridConfig(**config_kwargs)
    _EVAL_STATE["n_actions"] = n_actions
    _EVAL_STATE["step_cap"] = step_cap


def _eval_one(episode_dir: str):
    meta, world = _load_episode_for_eval(Path(episode_dir))
    outcome = run_episode(
        world=world,
        start=meta["start"],
        goal=meta["goal"],
        instruction=meta["instruction"],
        episode_id=meta["id"],
        shortest_path_length=meta["shortest_path_length"],
        decide=_EVAL_STATE["model"].decide_block,
        config=_EVAL_STATE["config"],
        n_actions=_EVAL_STATE["n_actions"],
        step_cap=_EVAL_STATE["step_cap"],
    )
    return outcome.result


def cmd_eval(args: argparse.Namespace) -> int:
    _echo_config(args)
    episodes_dir = resolve_input_path(args.episodes)
    dirs = list_episode_dirs(episodes_dir)
    if not dirs:
        raise CommandError("empty episode set")
    model_path = resolve_input_path(args.model)
    if not model_path.exists():
        raise CommandError(f"model checkpoint {args.model} not found")
    model = ActionChunkPredictor.load(model_path)
    if args.na is not None and args.na != model.n_actions:
        raise CommandError(
            f"--na {args.na} does not match checkpoint n_actions {model.n_actions}"
        )
    config = _grid_config(args, args.ablate)
    config_kwargs = dict(
        n_curr=config.n_curr,
        n_short=config.n_short,
        n_long=config.n_long,
        count_short=config.count_short,
        count_long=config.count_long,
        use_depth=config.use_depth,
        use_history=config.use_history,
    )
    if args.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=args.jobs,
            initializer=_eval_init,
            initargs=(str(model_path), config_kwargs, model.n_actions, args.step_cap),
        ) as pool:
            results = list(pool.map(_eval_one, [str(d) for d in dirs]))
    else:
        _eval_init(str(model_path), config_kwargs, model.n_actions, args.step_cap)
        results = [_eval_one(str(d)) for d in dirs]
    write_records(args.out, results, args.radius)
    _, records, _ = read_records(args.out)
    print(summary_line(records))
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    _echo_config(args)
    train_dirs = list_episode_dirs(resolve_input_path(args.train_episodes))
    eval_dirs = list_episode_dirs(resolve_input_path(args.eval_episodes))
    if not train_dirs:
        raise CommandError(f"no episodes found in {args.train_episodes}")
    if not eval_dirs:
        raise CommandError("empty episode set")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_episodes = [read_episode_dir(d) for d in train_dirs]
    print(
        f"ablation over {len(train_episodes)} training episodes and "
        f"{len(eval_dirs)} evaluation episodes (identical seeds for every variant)",
        file=sys.stderr,
    )
    rows = []
    for label, variant in ABLATION_VARIANTS:
        config = _grid_config(args, variant)
        samples: list[TrainingSample] = []
        for episode in train_episodes:
            samples.extend(build_samples(episode, config, n_actions=args.na))
        model = ActionChunkPredictor(
            n_actions=args.na,
            dimension=args.dimension,
            hash_seed=args.hash_seed,
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            batch_size=args.batch_size,
            l2=args.l2,
            holdout_fraction=args.holdout,
            rng_seed=args.seed,
        )
        model.fit([s.prompt for s in samples], [list(s.target) for s in samples])
        slug = variant.replace("-", "_")
        model.save(out_dir / f"model_{slug}.npz")
        config_kwargs = dict(
            n_curr=config.n_curr,
            n_short=config.n_short,
            n_long=config.n_long,
            count_short=config.count_short,
            count_long=config.count_long,
            use_depth=config.use_depth,
            use_history=config.use_history,
        )
        model_path = out_dir / f"model_{slug}.npz"
        if args.jobs > 1:
            with ProcessPoolExecutor(
                max_workers=args.jobs,
                initializer=_eval_init,
                initargs=(str(model_path), config_kwargs, args.na, args.step_cap),
            ) as pool:
                results = list(pool.map(_eval_one, [str(d) for d in eval_dirs]))
        else:
            _eval_init(str(model_path), config_kwargs, args.na, args.step_cap)
            results = [_eval_one(str(d)) for d in eval_dirs]
        records_path = out_dir / f"records_{slug}.txt"
        write_records(records_path, results, args.radius)
        _, _, summary = read_records(records_path)
        rows.append((label, summary))
        print(f"{label}: {summary_line_for(summary)}", file=sys.stderr)
    width = max(len(label) for label, _ in ABLATION_VARIANTS)
    print(f"{'variant'.ljust(width)}  {'NE':>9}  {'OS':>9}  {'SR':>9}  {'SPL':>9}")
    for label, summary in rows:
        print(
            f"{label.ljust(width)}  {summary['ne']:>9.6f}  {summary['oracle_sr']:>9.6f}"
            f"  {summary['sr']:>9.6f}  {summary['spl']:>9.6f}"
        )
    return 0


def summary_line_for(summary: dict) -> str:
    return (
        f"sr={summary['sr']:.6f} oracle_sr={summary['oracle_sr']:.6f}"
        f" spl={summary['spl']:.6f} ne={summary['ne']:.6f}"
    )


def cmd_report(args: argparse.Namespace) -> int:
    _echo_config(args)
    path = resolve_input_path(args.records)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(str(exc)) from exc
    radius, records, summary = validate_records_text(text)
    print(f"records: {len(records)} episodes at radius {radius}")
    print(summary_line(records))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solnav",
        description="Grid-structured text navigation: encode frames, simulate worlds, "
        "train and evaluate an action-chunk policy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a frame directory to observation text")
    p.add_argument("frame_dir", help="directory with rgb.ppm, depth.pfm, seg.pgm, labels.tsv")
    p.add_argument("--n", type=int, default=6, help="grid size")
    p.add_argument("--no-depth", action="store_true", help="omit depth fields")
    p.add_argument("--out", default=None, help="write to file instead of stdout")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("simulate", help="generate episode directories")
    p.add_argument("--seed", type=int, default=0, help="first episode seed")
    p.add_argument("--count", type=int, default=1, help="number of episodes")
    p.add_argument(
        "--difficulty",
        choices=DIFFICULTIES + ("mixed",),
        default="mixed",
        help="world difficulty; mixed draws corridor and rooms by seed",
    )
    p.add_argument("--out", default="episodes", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("build-dataset", help="episode directories -> training samples JSONL")
    p.add_argument("episodes", help="directory of episode directories")
    p.add_argument("--out", default="samples.jsonl", help="output JSONL file")
    p.add_argument("--na", type=int, default=4, help="action block size")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("train", help="train the action-chunk predictor")
    p.add_argument("samples", help="training samples JSONL")
    p.add_argument("--out", default="model.npz", help="checkpoint path")
    p.add_argument("--na", type=int, default=None, help="expected action block size")
    p.add_argument("--dimension", type=int, default=65536, help="hashed feature dimension")
    p.add_argument("--hash-seed", type=int, default=0, help="feature hash seed")
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--holdout", type=float, default=0.1, help="held-out fraction")
    p.add_argument("--seed", type=int, default=0, help="training rng seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="closed-loop evaluation of a checkpoint")
    p.add_argument("episodes", help="directory of episode directories")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--out", default="metrics.txt", help="metric records output")
    p.add_argument("--radius", type=float, default=DEFAULT_RADIUS, help="success radius (m)")
    p.add_argument("--step-cap", type=int, default=200, help="max executed actions")
    p.add_argument("--na", type=int, default=None, help="must match checkpoint if given")
    p.add_argument(
        "--ablate",
        choices=[v for _, v in ABLATION_VARIANTS],
        default=None,
        help="apply one ablation variant's observation config",
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="train and evaluate the four observation variants")
    p.add_argument("--train-episodes", required=True, help="training episode directory")
    p.add_argument("--eval-episodes", required=True, help="evaluation episode directory")
    p.add_argument("--out-dir", default="ablation", help="artifact output directory")
    p.add_argument("--na", type=int, default=4, help="action block size")
    p.add_argument("--radius", type=float, default=DEFAULT_RADIUS, help="success radius (m)")
    p.add_argument("--step-cap", type=int, default=200, help="max executed actions")
    p.add_argument("--dimension", type=int, default=65536)
    p.add_argument("--hash-seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--l2", type=float, default=1e-6)
    p.add_argument("--holdout", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0, help="training rng seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    _add_grid_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="validate and summarize a metric records file")
    p.add_argument("records", help="records file path")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, GenerationError, NoPathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
