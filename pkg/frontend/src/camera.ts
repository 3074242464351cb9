// Orthographic projection and screen-space picking.
//
// 2D views are just the axis-aligned orthographic projections of the 3D
// scene; the free camera is yaw (around the world z axis) then pitch.

import type { Camera } from "./state.js";
import type { Primitive, Vec3 } from "./render.js";

export interface Viewport {
  width: number;
  height: number;
}

export type Vec2 = [number, number];

export function project(point: Vec3, camera: Camera, viewport: Viewport): Vec2 {
  const [x, y, z] = point;
  let u: number;
  let v: number;
  switch (camera.axis) {
    case "X": // looking along +x: screen = (y, z)
      u = y;
      v = z;
      break;
    case "Y": // looking along +y: screen = (x, z)
      u = x;
      v = z;
      break;
    case "Z": // looking down -z: screen = (x, y)
      u = x;
      v = y;
      break;
    default: {
      const cy = Math.cos(camera.yaw);
      const sy = Math.sin(camera.yaw);
      const cp = Math.cos(camera.pitch);
      const sp = Math.sin(camera.pitch);
      const rx = cy * x + sy * y;
      const ry = -sy * x + cy * y;
      u = rx;
      v = cp * z - sp * ry;
      break;
    }
  }
  return [
    viewport.width / 2 + u * camera.zoom + camera.panX,
    viewport.height / 2 - v * camera.zoom + camera.panY,
  ];
}

export function distanceToSegment(p: Vec2, a: Vec2, b: Vec2): number {
  const abx = b[0] - a[0];
  const aby = b[1] - a[1];
  const lengthSq = abx * abx + aby * aby;
  let t = 0;
  if (lengthSq > 0) {
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / lengthSq;
    t = Math.max(0, Math.min(1, t));
  }
  const qx = a[0] + t * abx;
  const qy = a[1] + t * aby;
  return Math.hypot(p[0] - qx, p[1] - qy);
}

export const PICK_TOLERANCE_PX = 6;

export interface PickHit {
  primitive: Primitive;
  distance: number;
}

function* screenSegments(
  primitive: Primitive,
  camera: Camera,
  viewport: Viewport,
): Generator<[Vec2, Vec2]> {
  if (primitive.kind === "polyline") {
    const pts = primitive.points.map((p) => project(p, camera, viewport));
    for (let i = 0; i + 1 < pts.length; i++) yield [pts[i], pts[i + 1]];
    if (primitive.closed && pts.length > 2) yield [pts[pts.length - 1], pts[0]];
  } else if (primitive.kind === "segments") {
    for (const [a, b] of primitive.segments) {
      yield [project(a, camera, viewport), project(b, camera, viewport)];
    }
  }
}

/** Nearest primitive within the pick tolerance, or null for empty space. */
export function pick(
  primitives: Primitive[],
  screen: Vec2,
  camera: Camera,
  viewport: Viewport,
  tolerance: number = PICK_TOLERANCE_PX,
): PickHit | null {
  let best: PickHit | null = null;
  for (const primitive of primitives) {
    let distance = Infinity;
    if (primitive.kind === "marker") {
      const center = project(primitive.position, camera, viewport);
      distance = Math.hypot(screen[0] - center[0], screen[1] - center[1]);
    } else {
      for (const [a, b] of screenSegments(primitive, camera, viewport)) {
        distance = Math.min(distance, distanceToSegment(screen, a, b));
      }
    }
    if (distance <= tolerance && (best === null || distance < best.distance)) {
      best = { primitive, distance };
    }
  }
  return best;
}
