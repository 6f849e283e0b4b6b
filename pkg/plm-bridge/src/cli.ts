#!/usr/bin/env node
/**
 * plm-bridge: evaluate a chat-completions endpoint on exported episodes.
 *
 *   plm-bridge eval --episodes DIR --samples FILE --out FILE [endpoint flags]
 *   plm-bridge query --prompt-file FILE [endpoint flags]
 *
 * Endpoint settings come from flags first, then environment variables
 * (PLM_BASE_URL, PLM_API_KEY, PLM_MODEL).
 */

import { readFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { type EndpointConfig, endpointConfig, queryActionBlock } from "./client.js";
import { runEval } from "./eval.js";

const USAGE = `usage:
  plm-bridge eval --episodes DIR --samples FILE --out FILE [options]
  plm-bridge query --prompt-file FILE [options]

endpoint options (flag > environment > default):
  --base-url URL      chat-completions base URL         [PLM_BASE_URL]
  --api-key KEY       bearer token, omitted when empty  [PLM_API_KEY]
  --model NAME        model name sent in the request    [PLM_MODEL, "default"]
  --timeout SECONDS   per-request timeout               [30]
  --max-retries N     retries before the stop fallback  [2]
  --temperature T     sampling temperature              [0]
  --max-tokens N      completion length limit           [64]

eval options:
  --radius METERS     success radius                    [3.0]
  --step-cap N        executed-step cap per episode     [200]
  --na N              actions predicted per request     [4]
  --concurrency N     episodes in flight                [1]
`;

function buildEndpoint(values: Record<string, string | boolean | undefined>): EndpointConfig {
  const baseUrl = (values["base-url"] as string | undefined) ?? process.env["PLM_BASE_URL"];
  if (!baseUrl) {
    throw new Error("endpoint base URL is required (--base-url or PLM_BASE_URL)");
  }
  const apiKey = (values["api-key"] as string | undefined) ?? process.env["PLM_API_KEY"];
  return endpointConfig({
    baseUrl,
    modelName: (values["model"] as string | undefined) ?? process.env["PLM_MODEL"] ?? "default",
    ...(apiKey ? { apiKey } : {}),
    timeoutSeconds: Number((values["timeout"] as string | undefined) ?? 30),
    maxRetries: Number((values["max-retries"] as string | undefined) ?? 2),
    temperature: Number((values["temperature"] as string | undefined) ?? 0),
    maxTokens: Number((values["max-tokens"] as string | undefined) ?? 64),
  });
}

const ENDPOINT_FLAGS = {
  "base-url": { type: "string" },
  "api-key": { type: "string" },
  model: { type: "string" },
  timeout: { type: "string" },
  "max-retries": { type: "string" },
  temperature: { type: "string" },
  "max-tokens": { type: "string" },
} as const;

function requirePositive(name: string, value: number, integer: boolean): number {
  if (Number.isNaN(value) || value <= 0 || (integer && !Number.isInteger(value))) {
    throw new Error(`${name} must be a positive ${integer ? "integer" : "number"}`);
  }
  return value;
}

async function cmdEval(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      ...ENDPOINT_FLAGS,
      episodes: { type: "string" },
      samples: { type: "string" },
      out: { type: "string" },
      radius: { type: "string" },
      "step-cap": { type: "string" },
      na: { type: "string" },
      concurrency: { type: "string" },
    },
  });
  for (const key of ["episodes", "samples", "out"] as const) {
    if (!values[key]) throw new Error(`--${key} is required`);
  }
  const summary = await runEval({
    episodesRoot: values.episodes!,
    samplesPath: values.samples!,
    outPath: values.out!,
    endpoint: buildEndpoint(values),
    radius: requirePositive("--radius", Number(values.radius ?? 3.0), false),
    stepCap: requirePositive("--step-cap", Number(values["step-cap"] ?? 200), true),
    nActions: requirePositive("--na", Number(values.na ?? 4), true),
    concurrency: requirePositive("--concurrency", Number(values.concurrency ?? 1), true),
  });
  console.log(
    `wrote ${summary.episodes} records -> ${values.out}` +
      ` (requests=${summary.requests} parse_failures=${summary.parseFailures}` +
      ` failed_episodes=${summary.failedEpisodes.length})`,
  );
  return summary.failedEpisodes.length > 0 ? 1 : 0;
}

async function cmdQuery(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      ...ENDPOINT_FLAGS,
      "prompt-file": { type: "string" },
      na: { type: "string" },
    },
  });
  if (!values["prompt-file"]) throw new Error("--prompt-file is required");
  const prompt = readFileSync(values["prompt-file"], "utf-8");
  const nActions = requirePositive("--na", Number(values.na ?? 4), true);
  const result = await queryActionBlock(prompt, buildEndpoint(values), nActions);
  console.log(JSON.stringify({ block: result.block, parse_failed: result.parseFailed, attempts: result.attempts }));
  return result.parseFailed ? 1 : 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "eval") return await cmdEval(rest);
    if (command === "query") return await cmdQuery(rest);
    process.stderr.write(USAGE);
    return command === undefined || command === "--help" || command === "-h" ? 0 : 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }
}

process.exitCode = await main();
