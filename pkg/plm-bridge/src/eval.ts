/** Whole-suite evaluation: episodes in, records file out. */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";

import { type EndpointConfig, queryActionBlock } from "./client.js";
import { PromptBook, listEpisodeDirs, readEpisodeDir } from "./episodes.js";
import { type EpisodeResult, renderRecords } from "./format.js";
import { runEpisode } from "./rollout.js";

export interface EvalOptions {
  episodesRoot: string;
  samplesPath: string;
  outPath: string;
  endpoint: EndpointConfig;
  radius: number;
  stepCap: number;
  nActions: number;
  concurrency: number;
  log?: (line: string) => void;
}

export interface EvalSummary {
  episodes: number;
  failedEpisodes: string[];
  parseFailures: number;
  requests: number;
}

interface Slot {
  result?: EpisodeResult;
  failure?: string;
}

/**
 * Runs every episode under the endpoint policy with bounded concurrency.
 * Records keep directory order no matter which episodes finish first. An
 * episode that cannot run at all (unreadable files, no recorded prompts)
 * is reported and skipped; the run continues.
 */
export async function runEval(options: EvalOptions): Promise<EvalSummary> {
  const log = options.log ?? ((line: string) => console.error(line));
  const dirs = listEpisodeDirs(options.episodesRoot);
  if (dirs.length === 0) throw new Error(`no episode directories under ${options.episodesRoot}`);
  const book = PromptBook.fromFile(options.samplesPath);
  const slots: Slot[] = dirs.map(() => ({}));
  let parseFailures = 0;
  let requests = 0;
  let next = 0;

  const runOne = async (index: number) => {
    const dir = dirs[index]!;
    try {
      const episode = readEpisodeDir(dir);
      if (!book.has(episode.meta.id)) throw new Error(`no recorded prompts for ${episode.meta.id}`);
      const outcome = await runEpisode(
        episode.world,
        episode.meta,
        (stepIndex) => book.promptFor(episode.meta.id, stepIndex),
        async (prompt) => queryActionBlock(prompt, options.endpoint, options.nActions),
        { nActions: options.nActions, stepCap: options.stepCap },
      );
      requests += outcome.requests;
      if (outcome.parseFailures > 0) {
        parseFailures += outcome.parseFailures;
        log(`episode=${episode.meta.id} parse_failures=${outcome.parseFailures} of ${outcome.requests} requests`);
      }
      slots[index]!.result = outcome.result;
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      slots[index]!.failure = message;
      log(`episode_dir=${basename(dir)} failed: ${message}`);
    }
  };

  const workers = Math.max(1, Math.min(options.concurrency, dirs.length));
  await Promise.all(
    Array.from({ length: workers }, async () => {
      while (next < dirs.length) {
        const index = next;
        next += 1;
        await runOne(index);
      }
    }),
  );

  const results = slots.flatMap((s) => (s.result ? [s.result] : []));
  const failed = dirs.filter((_, i) => slots[i]!.failure !== undefined).map((d) => basename(d));
  if (results.length === 0) throw new Error("every episode failed; no records to write");
  writeFileSync(options.outPath, renderRecords(results, options.radius), { encoding: "utf-8" });
  if (parseFailures > 0 || failed.length > 0) {
    const sidecar = `${options.outPath}.failures`;
    const lines = [
      `parse_failures=${parseFailures}`,
      `failed_episodes=${failed.length}`,
      ...failed.map((name) => `failed=${name}`),
    ];
    writeFileSync(sidecar, lines.join("\n") + "\n", { encoding: "utf-8" });
  }
  return { episodes: results.length, failedEpisodes: failed, parseFailures, requests };
}
