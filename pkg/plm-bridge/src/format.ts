/**
 * Metrics records file: rendering, parsing, and the fixed 6-decimal float
 * format shared with the Python reporter.
 *
 * The records contract requires byte-identical output from independent
 * writers, so floats cannot go through toFixed: ECMAScript's toFixed rounds
 * ties away from zero while the reference format rounds the exact binary
 * value half to even (1/128 renders "0.007812", not "0.007813"). fmt6 does
 * the expansion exactly with BigInt on the raw float bits instead.
 */

export const RECORDS_HEADER = "# solnav metrics v1";
export const DEFAULT_RADIUS = 3.0;

const view = new DataView(new ArrayBuffer(8));

export function fmt6(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`cannot format non-finite value ${x}`);
  view.setFloat64(0, x);
  const hi = view.getUint32(0);
  const lo = view.getUint32(4);
  const negative = hi >>> 31 === 1;
  const biased = (hi >>> 20) & 0x7ff;
  const mantissa = (BigInt(hi & 0xfffff) << 32n) | BigInt(lo);
  // value = m * 2^e with integer m; subnormals have no implicit leading bit
  const m = biased === 0 ? mantissa : mantissa | (1n << 52n);
  const e = biased === 0 ? -1074 : biased - 1075;
  let scaled: bigint;
  if (e >= 0) {
    scaled = m * (1n << BigInt(e)) * 1000000n;
  } else {
    const shift = BigInt(-e);
    const num = m * 1000000n;
    const q = num >> shift;
    const twiceRemainder = (num & ((1n << shift) - 1n)) << 1n;
    const den = 1n << shift;
    scaled = twiceRemainder > den || (twiceRemainder === den && (q & 1n) === 1n) ? q + 1n : q;
  }
  const digits = scaled.toString().padStart(7, "0");
  const body = `${digits.slice(0, -6)}.${digits.slice(-6)}`;
  // "-0.000000" normalizes to "0.000000", same as the reference writer
  return negative && scaled !== 0n ? `-${body}` : body;
}

export interface EpisodeResult {
  episodeId: string;
  goal: readonly [number, number];
  final: readonly [number, number];
  stopped: boolean;
  steps: number;
  pathLength: number;
  shortestPathLength: number;
  minDist: number;
}

export function navigationError(result: EpisodeResult): number {
  const dx = result.final[0] - result.goal[0];
  const dy = result.final[1] - result.goal[1];
  return Math.sqrt(dx * dx + dy * dy);
}

export function isSuccess(result: EpisodeResult, radius: number): boolean {
  return result.stopped && navigationError(result) <= radius;
}

export function isOracleSuccess(result: EpisodeResult, radius: number): boolean {
  return result.minDist <= radius;
}

export function splTerm(result: EpisodeResult, radius: number): number {
  if (!isSuccess(result, radius)) return 0.0;
  const shortest = result.shortestPathLength;
  return shortest / Math.max(result.pathLength, shortest);
}

const RECORD_KEYS = [
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
] as const;
const FLOAT_KEYS = new Set(["ne", "spl", "path_length", "shortest_path", "final_x", "final_y", "goal_x", "goal_y"]);
const FLAG_KEYS = new Set(["success", "oracle_success", "stopped"]);

export function recordLine(result: EpisodeResult, radius: number): string {
  return (
    `episode=${result.episodeId}` +
    ` ne=${fmt6(navigationError(result))}` +
    ` success=${isSuccess(result, radius) ? 1 : 0}` +
    ` oracle_success=${isOracleSuccess(result, radius) ? 1 : 0}` +
    ` spl=${fmt6(splTerm(result, radius))}` +
    ` steps=${result.steps}` +
    ` path_length=${fmt6(result.pathLength)}` +
    ` shortest_path=${fmt6(result.shortestPathLength)}` +
    ` stopped=${result.stopped ? 1 : 0}` +
    ` final_x=${fmt6(result.final[0])}` +
    ` final_y=${fmt6(result.final[1])}` +
    ` goal_x=${fmt6(result.goal[0])}` +
    ` goal_y=${fmt6(result.goal[1])}`
  );
}

export type ParsedRecord = Record<string, string | number>;

export function parseRecordLine(line: string, lineNo = 0): ParsedRecord {
  const parts = line.split(" ");
  const keys: string[] = [];
  const raw: Record<string, string> = {};
  for (const part of parts) {
    const eq = part.indexOf("=");
    if (eq < 0) throw new Error(`line ${lineNo}: malformed field ${JSON.stringify(part)}`);
    const key = part.slice(0, eq);
    keys.push(key);
    raw[key] = part.slice(eq + 1);
  }
  if (keys.length !== RECORD_KEYS.length || keys.some((k, i) => k !== RECORD_KEYS[i])) {
    throw new Error(`line ${lineNo}: expected fields ${RECORD_KEYS.join(",")}, got ${keys.join(",")}`);
  }
  const record: ParsedRecord = { episode: raw["episode"]! };
  for (const key of RECORD_KEYS.slice(1)) {
    const text = raw[key]!;
    if (FLAG_KEYS.has(key)) {
      if (text !== "0" && text !== "1") throw new Error(`line ${lineNo}: ${key} must be 0 or 1, got ${text}`);
      record[key] = Number(text);
    } else if (FLOAT_KEYS.has(key)) {
      // strict canonical form: the text must round-trip through fmt6
      if (fmt6(Number(text)) !== text) throw new Error(`line ${lineNo}: ${key}=${text} is not in canonical form`);
      record[key] = Number(text);
    } else {
      if (!/^\d+$/.test(text)) throw new Error(`line ${lineNo}: ${key} must be a non-negative int, got ${text}`);
      record[key] = Number(text);
    }
  }
  return record;
}

/** Summary over the already-rounded record values, never raw internals. */
export function summaryLine(records: ParsedRecord[]): string {
  const n = records.length;
  let sr = 0.0;
  let osr = 0.0;
  let spl = 0.0;
  let ne = 0.0;
  if (n > 0) {
    for (const r of records) {
      sr += r["success"] as number;
      osr += r["oracle_success"] as number;
      spl += r["spl"] as number;
      ne += r["ne"] as number;
    }
    sr /= n;
    osr /= n;
    spl /= n;
    ne /= n;
  }
  return `summary episodes=${n} sr=${fmt6(sr)} oracle_sr=${fmt6(osr)} spl=${fmt6(spl)} ne=${fmt6(ne)}`;
}

export function renderRecords(results: EpisodeResult[], radius: number): string {
  const lines = [RECORDS_HEADER, `radius=${fmt6(radius)}`];
  const parsed: ParsedRecord[] = [];
  for (const result of results) {
    const line = recordLine(result, radius);
    lines.push(line);
    parsed.push(parseRecordLine(line));
  }
  lines.push(summaryLine(parsed));
  return lines.join("\n") + "\n";
}
