/** Action-block text convention: first bracketed list of n integers 0..3. */

export function fallbackBlock(nActions: number): number[] {
  return new Array(nActions).fill(0);
}

/**
 * Everything after the first stop in a block must be stop, matching the
 * trainer's padding rule. Models that emit e.g. [3, 0, 1, 0] get the tail
 * rewritten rather than rejected.
 */
export function enforceStopSuffix(block: number[]): number[] {
  const out = block.slice();
  const firstStop = out.indexOf(0);
  if (firstStop >= 0) {
    for (let i = firstStop + 1; i < out.length; i++) out[i] = 0;
  }
  return out;
}

/**
 * Extract the first bracketed group containing exactly nActions integers in
 * 0..3, e.g. "Actions: [3, 3, 1, 0]" -> [3, 3, 1, 0]. Returns null when no
 * group qualifies; the caller decides between retry and the stop fallback.
 */
export function parseActionBlock(text: string, nActions: number): number[] | null {
  const groups = text.matchAll(/\[([^\]]*)\]/g);
  for (const group of groups) {
    const tokens = group[1]!.split(",").map((t) => t.trim());
    if (tokens.length !== nActions) continue;
    if (!tokens.every((t) => /^[0-3]$/.test(t))) continue;
    return tokens.map(Number);
  }
  return null;
}
