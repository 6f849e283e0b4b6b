/**
 * Chat-completions client. The prompt travels as a single user message with
 * temperature 0; the system description stays inside the prompt text so the
 * bytes on the wire match what the local model trains on.
 */

import { enforceStopSuffix, fallbackBlock, parseActionBlock } from "./actions.js";

export interface EndpointConfig {
  baseUrl: string;
  modelName: string;
  apiKey?: string;
  timeoutSeconds: number;
  maxRetries: number;
  temperature: number;
  maxTokens: number;
}

export function endpointConfig(partial: Partial<EndpointConfig> & { baseUrl: string }): EndpointConfig {
  const cfg: EndpointConfig = {
    modelName: "default",
    timeoutSeconds: 30,
    maxRetries: 2,
    temperature: 0,
    maxTokens: 64,
    ...partial,
  };
  if (!cfg.baseUrl) throw new Error("endpoint base URL is required");
  if (cfg.maxRetries < 0 || !Number.isInteger(cfg.maxRetries)) throw new Error("maxRetries must be a non-negative integer");
  if (cfg.timeoutSeconds <= 0) throw new Error("timeoutSeconds must be positive");
  return cfg;
}

export interface ActionBlockResult {
  block: number[];
  parseFailed: boolean;
  attempts: number;
  error?: string;
}

async function requestCompletion(prompt: string, cfg: EndpointConfig): Promise<string> {
  const url = cfg.baseUrl.replace(/\/+$/, "") + "/chat/completions";
  const headers: Record<string, string> = { "content-type": "application/json" };
  if (cfg.apiKey) headers["authorization"] = `Bearer ${cfg.apiKey}`;
  const response = await fetch(url, {
    method: "POST",
    headers,
    body: JSON.stringify({
      model: cfg.modelName,
      messages: [{ role: "user", content: prompt }],
      temperature: cfg.temperature,
      max_tokens: cfg.maxTokens,
    }),
    signal: AbortSignal.timeout(cfg.timeoutSeconds * 1000),
  });
  if (!response.ok) {
    throw new Error(`endpoint returned ${response.status}`);
  }
  const body = (await response.json()) as { choices?: Array<{ message?: { content?: unknown } }> };
  const content = body.choices?.[0]?.message?.content;
  if (typeof content !== "string") {
    throw new Error("completion has no message content");
  }
  return content;
}

/**
 * Query one action block. A timeout, transport error, or a completion with
 * no parseable block is retried up to cfg.maxRetries times; when retries
 * are exhausted the stop block [0, ...] is returned with parseFailed set,
 * never an exception. Errors must not kill a closed-loop run.
 */
export async function queryActionBlock(prompt: string, cfg: EndpointConfig, nActions = 4): Promise<ActionBlockResult> {
  let lastError = "";
  const attempts = cfg.maxRetries + 1;
  for (let attempt = 1; attempt <= attempts; attempt++) {
    try {
      const completion = await requestCompletion(prompt, cfg);
      const block = parseActionBlock(completion, nActions);
      if (block === null) {
        throw new Error(`completion has no bracketed list of ${nActions} actions`);
      }
      return { block: enforceStopSuffix(block), parseFailed: false, attempts: attempt };
    } catch (err) {
      lastError = err instanceof Error ? err.message : String(err);
      if (attempt < attempts) {
        await new Promise((resolve) => setTimeout(resolve, 100 * attempt));
      }
    }
  }
  return { block: fallbackBlock(nActions), parseFailed: true, attempts, error: lastError };
}
