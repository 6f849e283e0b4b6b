/**
 * Closed-loop episode execution, matching the primary evaluator's contract:
 * re-prompt once per action block, a stop ends the episode without
 * consuming a step, a blocked forward consumes a step in place, and the
 * step cap bounds executed steps.
 *
 * The one divergence from the primary is where prompts come from. The
 * primary renders frames as it moves; the bridge replays prompts that the
 * exporter recorded at each block boundary of the oracle trajectory,
 * indexed by executed-step count. While the policy tracks the oracle the
 * prompts are exactly the closed-loop ones; once it diverges they are an
 * approximation, clamped to the recorded horizon.
 */

import { type EpisodeResult } from "./format.js";
import { type Pose, type World, STOP, checkAction, dist2d, step } from "./geometry.js";
import { type EpisodeMeta } from "./episodes.js";

export interface RolloutOptions {
  nActions: number;
  stepCap: number;
}

export interface RolloutOutcome {
  result: EpisodeResult;
  executed: number[];
  requests: number;
  parseFailures: number;
}

export interface BlockDecision {
  block: number[];
  parseFailed: boolean;
}

export type DecideFn = (prompt: string) => Promise<BlockDecision>;
export type PromptFn = (stepIndex: number) => string;

export async function runEpisode(
  world: World,
  meta: EpisodeMeta,
  promptFor: PromptFn,
  decide: DecideFn,
  options: RolloutOptions,
): Promise<RolloutOutcome> {
  const { nActions, stepCap } = options;
  if (nActions < 1) throw new Error(`nActions must be >= 1, got ${nActions}`);
  if (stepCap < 1) throw new Error(`stepCap must be >= 1, got ${stepCap}`);
  let pose: Pose = meta.start;
  const goal = meta.goal;
  let minDist = dist2d(pose.x, pose.y, goal[0], goal[1]);
  let pathLength = 0.0;
  let steps = 0;
  let stopped = false;
  let requests = 0;
  let parseFailures = 0;
  const executed: number[] = [];
  const pending: number[] = [];
  while (true) {
    if (pending.length === 0) {
      const decision = await decide(promptFor(steps));
      requests += 1;
      if (decision.parseFailed) parseFailures += 1;
      if (decision.block.length !== nActions) {
        throw new Error(`policy returned ${decision.block.length} actions, expected ${nActions}`);
      }
      pending.push(...decision.block.map(checkAction));
    }
    const action = pending.shift()!;
    executed.push(action);
    if (action === STOP) {
      stopped = true;
      break;
    }
    const before = pose;
    pose = step(world, pose, action);
    pathLength += dist2d(before.x, before.y, pose.x, pose.y);
    minDist = Math.min(minDist, dist2d(pose.x, pose.y, goal[0], goal[1]));
    steps += 1;
    if (steps >= stepCap) break;
  }
  const result: EpisodeResult = {
    episodeId: meta.id,
    goal,
    final: [pose.x, pose.y],
    stopped,
    steps,
    pathLength,
    shortestPathLength: meta.shortestPathLength,
    minDist,
  };
  return { result, executed, requests, parseFailures };
}
