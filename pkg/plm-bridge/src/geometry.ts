/**
 * Agent motion and collision geometry, mirrored from the Python world model.
 *
 * Both implementations run IEEE-754 binary64 arithmetic in the same
 * operation order, so executed trajectories match bit for bit. Distances
 * use the explicit sqrt(dx*dx + dy*dy) form rather than Math.hypot: engines
 * do not agree on hypot's last-ulp rounding.
 */

export const STOP = 0;
export const TURN_LEFT = 1;
export const TURN_RIGHT = 2;
export const FORWARD = 3;
export const TURN_DEGREES = 15.0;
export const STEP_METERS = 0.25;
export const AGENT_RADIUS = 0.15;

// (cos, sin) for heading index k = heading / 15 degrees; frozen literals
// shared with the Python table so forward moves land on identical bits.
export const DIR_TABLE: ReadonlyArray<readonly [number, number]> = [
  [1.0, 0.0],
  [0.9659258262890683, 0.25881904510252074],
  [0.8660254037844387, 0.5],
  [0.7071067811865476, 0.7071067811865475],
  [0.5, 0.8660254037844386],
  [0.25881904510252074, 0.9659258262890683],
  [0.0, 1.0],
  [-0.25881904510252085, 0.9659258262890683],
  [-0.5, 0.8660254037844387],
  [-0.7071067811865475, 0.7071067811865476],
  [-0.8660254037844387, 0.5],
  [-0.9659258262890682, 0.258819045102521],
  [-1.0, 0.0],
  [-0.9659258262890683, -0.2588190451025208],
  [-0.8660254037844386, -0.5],
  [-0.7071067811865477, -0.7071067811865475],
  [-0.5, -0.8660254037844384],
  [-0.25881904510252063, -0.9659258262890683],
  [0.0, -1.0],
  [0.2588190451025203, -0.9659258262890684],
  [0.5, -0.8660254037844386],
  [0.7071067811865474, -0.7071067811865477],
  [0.8660254037844384, -0.5],
  [0.9659258262890683, -0.2588190451025207],
];

export interface Pose {
  x: number;
  y: number;
  headingDeg: number;
}

export interface Obstacle {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  labelId: number;
  color: readonly [number, number, number];
}

export interface World {
  seed: number;
  difficulty: string;
  bounds: readonly [number, number];
  obstacles: Obstacle[];
  labels: Map<number, string>;
}

export function checkAction(action: number): number {
  if (!Number.isInteger(action) || action < 0 || action > 3) {
    throw new Error(`invalid action ${action}`);
  }
  return action;
}

export function headingIndex(headingDeg: number): number {
  const k = headingDeg / TURN_DEGREES;
  const ki = Math.round(k);
  if (Math.abs(k - ki) > 1e-9) {
    throw new Error(`heading ${headingDeg} is not a multiple of ${TURN_DEGREES} degrees`);
  }
  return ((ki % 24) + 24) % 24;
}

export function dist2d(ax: number, ay: number, bx: number, by: number): number {
  const dx = bx - ax;
  const dy = by - ay;
  return Math.sqrt(dx * dx + dy * dy);
}

function segmentPointDist2(ax: number, ay: number, bx: number, by: number, px: number, py: number): number {
  const vx = bx - ax;
  const vy = by - ay;
  const wx = px - ax;
  const wy = py - ay;
  const vv = vx * vx + vy * vy;
  const t = vv === 0.0 ? 0.0 : Math.max(0.0, Math.min(1.0, (wx * vx + wy * vy) / vv));
  const dx = wx - t * vx;
  const dy = wy - t * vy;
  return dx * dx + dy * dy;
}

type Pt = readonly [number, number];

function orient(a: Pt, b: Pt, c: Pt): number {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

function segmentsIntersect(p1: Pt, p2: Pt, p3: Pt, p4: Pt): boolean {
  const d1 = orient(p3, p4, p1);
  const d2 = orient(p3, p4, p2);
  const d3 = orient(p1, p2, p3);
  const d4 = orient(p1, p2, p4);
  return d1 > 0 !== d2 > 0 && d3 > 0 !== d4 > 0;
}

function segmentSegmentDist2(a: Pt, b: Pt, c: Pt, d: Pt): number {
  if (segmentsIntersect(a, b, c, d)) return 0.0;
  return Math.min(
    segmentPointDist2(a[0], a[1], b[0], b[1], c[0], c[1]),
    segmentPointDist2(a[0], a[1], b[0], b[1], d[0], d[1]),
    segmentPointDist2(c[0], c[1], d[0], d[1], a[0], a[1]),
    segmentPointDist2(c[0], c[1], d[0], d[1], b[0], b[1]),
  );
}

export function segmentBoxDistance(ax: number, ay: number, bx: number, by: number, box: Obstacle): number {
  const inside = (px: number, py: number) => box.x0 <= px && px <= box.x1 && box.y0 <= py && py <= box.y1;
  if (inside(ax, ay) || inside(bx, by)) return 0.0;
  const corners: Pt[] = [
    [box.x0, box.y0],
    [box.x1, box.y0],
    [box.x1, box.y1],
    [box.x0, box.y1],
  ];
  let best = Infinity;
  for (let i = 0; i < 4; i++) {
    const c = corners[i]!;
    const d = corners[(i + 1) % 4]!;
    best = Math.min(best, segmentSegmentDist2([ax, ay], [bx, by], c, d));
    if (best === 0.0) break;
  }
  return Math.sqrt(best);
}

export function pointBoxDistance(px: number, py: number, box: Obstacle): number {
  const dx = Math.max(box.x0 - px, 0.0, px - box.x1);
  const dy = Math.max(box.y0 - py, 0.0, py - box.y1);
  return Math.sqrt(dx * dx + dy * dy);
}

export function moveIsFree(world: World, x0: number, y0: number, x1: number, y1: number): boolean {
  const [w, h] = world.bounds;
  if (!(AGENT_RADIUS <= x1 && x1 <= w - AGENT_RADIUS && AGENT_RADIUS <= y1 && y1 <= h - AGENT_RADIUS)) {
    return false;
  }
  return world.obstacles.every((o) => segmentBoxDistance(x0, y0, x1, y1, o) >= AGENT_RADIUS);
}

/** Execute one action. A blocked forward leaves the pose unchanged. */
export function step(world: World, pose: Pose, action: number): Pose {
  checkAction(action);
  if (action === STOP) return pose;
  if (action === TURN_LEFT) {
    return { x: pose.x, y: pose.y, headingDeg: (((pose.headingDeg + TURN_DEGREES) % 360.0) + 360.0) % 360.0 };
  }
  if (action === TURN_RIGHT) {
    return { x: pose.x, y: pose.y, headingDeg: (((pose.headingDeg - TURN_DEGREES) % 360.0) + 360.0) % 360.0 };
  }
  const dir = DIR_TABLE[headingIndex(pose.headingDeg)]!;
  const nx = pose.x + STEP_METERS * dir[0];
  const ny = pose.y + STEP_METERS * dir[1];
  if (!moveIsFree(world, pose.x, pose.y, nx, ny)) return pose;
  return { x: nx, y: ny, headingDeg: pose.headingDeg };
}

const WALL_HEIGHT = 2.5;

export function parseScene(text: string): World {
  let seed = 0;
  let difficulty = "custom";
  let bounds: readonly [number, number] = [0.0, 0.0];
  const labels = new Map<number, string>();
  const obstacles: Obstacle[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (!line || line.startsWith("#")) continue;
    const eq = line.indexOf("=");
    if (eq < 0) throw new Error(`scene line ${i + 1}: expected key=value`);
    const key = line.slice(0, eq);
    const value = line.slice(eq + 1);
    if (key === "seed") {
      seed = Number(value);
    } else if (key === "difficulty") {
      difficulty = value;
    } else if (key === "bounds") {
      const [bx, by] = value.split(" ");
      bounds = [Number(bx), Number(by)];
    } else if (key === "wall_height") {
      if (Math.abs(Number(value) - WALL_HEIGHT) > 1e-9) {
        throw new Error(`scene line ${i + 1}: unsupported wall height ${value}`);
      }
    } else if (key === "label") {
      const space = value.indexOf(" ");
      if (space < 0) throw new Error(`scene line ${i + 1}: expected "label=<id> <name>"`);
      labels.set(Number(value.slice(0, space)), value.slice(space + 1));
    } else if (key === "obstacle") {
      const parts = value.split(/\s+/);
      if (parts.length !== 8) throw new Error(`scene line ${i + 1}: expected 8 obstacle fields`);
      const nums = parts.map(Number);
      if (nums.some((n) => Number.isNaN(n))) throw new Error(`scene line ${i + 1}: bad obstacle number`);
      obstacles.push({
        labelId: nums[0]!,
        x0: nums[1]!,
        y0: nums[2]!,
        x1: nums[3]!,
        y1: nums[4]!,
        color: [nums[5]!, nums[6]!, nums[7]!],
      });
    } else {
      throw new Error(`scene line ${i + 1}: unknown key ${key}`);
    }
  }
  if (!(bounds[0] > 0 && bounds[1] > 0)) throw new Error("scene is missing positive bounds");
  return { seed, difficulty, bounds, obstacles, labels };
}
