/** Episode directories and recorded prompts, as exported by the solnav CLI. */

import { readFileSync, readdirSync, existsSync, statSync } from "node:fs";
import { join } from "node:path";

import { type Pose, type World, checkAction, parseScene } from "./geometry.js";

export const META_NAME = "episode.meta";
export const SCENE_NAME = "scene.txt";

export interface EpisodeMeta {
  id: string;
  instruction: string;
  start: Pose;
  goal: readonly [number, number];
  shortestPathLength: number;
  actions: number[];
}

const META_KEYS = [
  "id",
  "instruction",
  "start_x",
  "start_y",
  "start_heading",
  "goal_x",
  "goal_y",
  "shortest_path_length",
  "actions",
];

export function parseEpisodeMeta(text: string, source = "episode.meta"): EpisodeMeta {
  const raw: Record<string, string> = {};
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!;
    if (!line.trim()) continue;
    const eq = line.indexOf("=");
    if (eq < 0) throw new Error(`${source}: line ${i + 1}: expected key=value`);
    raw[line.slice(0, eq)] = line.slice(eq + 1);
  }
  const missing = META_KEYS.filter((k) => !(k in raw));
  if (missing.length > 0) throw new Error(`${source}: missing keys ${missing.join(",")}`);
  const num = (key: string): number => {
    const v = Number(raw[key]);
    if (Number.isNaN(v)) throw new Error(`${source}: ${key} is not a number`);
    return v;
  };
  return {
    id: raw["id"]!,
    instruction: raw["instruction"]!,
    start: { x: num("start_x"), y: num("start_y"), headingDeg: num("start_heading") },
    goal: [num("goal_x"), num("goal_y")],
    shortestPathLength: num("shortest_path_length"),
    actions: raw["actions"]!.split(/\s+/).filter((t) => t.length > 0).map((t) => checkAction(Number(t))),
  };
}

export interface EpisodeDir {
  path: string;
  meta: EpisodeMeta;
  world: World;
}

export function readEpisodeDir(path: string): EpisodeDir {
  const meta = parseEpisodeMeta(readFileSync(join(path, META_NAME), "utf-8"), join(path, META_NAME));
  const world = parseScene(readFileSync(join(path, SCENE_NAME), "utf-8"));
  return { path, meta, world };
}

/** Episode directories under root, sorted by name (matching the exporter). */
export function listEpisodeDirs(root: string): string[] {
  return readdirSync(root)
    .sort()
    .map((name) => join(root, name))
    .filter((p) => statSync(p).isDirectory() && existsSync(join(p, META_NAME)));
}

/**
 * Recorded prompts from a samples JSONL file, keyed by episode and step
 * index. Rollouts re-prompt every n_actions executed steps; when a rollout
 * runs past the recorded horizon it holds the last recorded prompt, so a
 * lookup clamps to the nearest recorded index at or below the query.
 */
export class PromptBook {
  private byEpisode = new Map<string, { steps: number[]; prompts: string[] }>();

  static fromFile(path: string): PromptBook {
    const book = new PromptBook();
    const text = readFileSync(path, "utf-8");
    const lines = text.split("\n");
    for (let i = 0; i < lines.length; i++) {
      const line = lines[i]!;
      if (!line.trim()) continue;
      let record: unknown;
      try {
        record = JSON.parse(line);
      } catch {
        throw new Error(`${path}: line ${i + 1}: malformed record`);
      }
      const r = record as { prompt?: unknown; episode_id?: unknown; step_index?: unknown };
      if (typeof r.prompt !== "string" || typeof r.episode_id !== "string" || typeof r.step_index !== "number") {
        throw new Error(`${path}: line ${i + 1}: malformed record fields`);
      }
      book.add(r.episode_id, r.step_index, r.prompt);
    }
    return book;
  }

  add(episodeId: string, stepIndex: number, prompt: string): void {
    let entry = this.byEpisode.get(episodeId);
    if (!entry) {
      entry = { steps: [], prompts: [] };
      this.byEpisode.set(episodeId, entry);
    }
    // insertion keeps step order; sample files are written in step order
    // but a sorted insert costs nothing and drops the assumption
    let at = entry.steps.length;
    while (at > 0 && entry.steps[at - 1]! > stepIndex) at--;
    entry.steps.splice(at, 0, stepIndex);
    entry.prompts.splice(at, 0, prompt);
  }

  has(episodeId: string): boolean {
    return this.byEpisode.has(episodeId);
  }

  promptFor(episodeId: string, stepIndex: number): string {
    const entry = this.byEpisode.get(episodeId);
    if (!entry || entry.steps.length === 0) throw new Error(`no recorded prompts for episode ${episodeId}`);
    let lo = 0;
    let hi = entry.steps.length - 1;
    if (stepIndex <= entry.steps[0]!) return entry.prompts[0]!;
    while (lo < hi) {
      const mid = (lo + hi + 1) >> 1;
      if (entry.steps[mid]! <= stepIndex) lo = mid;
      else hi = mid - 1;
    }
    return entry.prompts[lo]!;
  }
}
