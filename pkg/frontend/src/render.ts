// Turning one instance into drawable wireframe primitives.
//
// renderInstance is a pure function of (instance, resolved draw settings,
// mode): same input, same primitive list. Shapes: Line is an open
// polyline through the points, Point is one marker per point, Polygon is
// a closed outline, Prism is the 12-edge wireframe of a box given as 8
// corners (bottom face then top face, matching order). Energy-tower mode
// swaps a prism for one of equal base whose height is energyScale*Energy;
// a zero-height tower degenerates to its base outline.

import type { InstanceJson, RGB } from "./model.js";

export type Vec3 = [number, number, number];

export interface BasePrimitive {
  color: RGB;
  width: number;
  origPath: string;
  typeName: string;
}

export interface PolylinePrimitive extends BasePrimitive {
  kind: "polyline";
  points: Vec3[];
  closed: boolean;
}

export interface MarkerPrimitive extends BasePrimitive {
  kind: "marker";
  position: Vec3;
  size: number;
}

export interface SegmentsPrimitive extends BasePrimitive {
  kind: "segments";
  segments: [Vec3, Vec3][];
}

export type Primitive = PolylinePrimitive | MarkerPrimitive | SegmentsPrimitive;

export interface DrawSettings {
  drawAs?: string; // Point | Line | Polygon | Prism (case-insensitive)
  color: RGB;
  lineWidth: number;
  markerSize: number;
  visible: boolean;
  energy?: number; // resolved Energy, used by energy-tower mode
}

export interface RenderMode {
  energyTower: boolean;
  energyScale: number; // mm per MeV
}

export const DEFAULT_COLOR: RGB = [0.8, 0.8, 0.8];

const BOX_EDGES: [number, number][] = [
  [0, 1],
  [1, 2],
  [2, 3],
  [3, 0],
  [4, 5],
  [5, 6],
  [6, 7],
  [7, 4],
  [0, 4],
  [1, 5],
  [2, 6],
  [3, 7],
];

function points3(instance: InstanceJson): Vec3[] {
  return (instance.points ?? []).map((p) => [p.x, p.y, p.z] as Vec3);
}

function towerCorners(base: Vec3[], top: Vec3[], height: number): Vec3[] {
  // Grow from the base along the prism's own axis.
  const axis: Vec3 = [top[0][0] - base[0][0], top[0][1] - base[0][1], top[0][2] - base[0][2]];
  const len = Math.hypot(axis[0], axis[1], axis[2]) || 1;
  const unit: Vec3 = [axis[0] / len, axis[1] / len, axis[2] / len];
  const lifted = base.map(
    (p) => [p[0] + unit[0] * height, p[1] + unit[1] * height, p[2] + unit[2] * height] as Vec3,
  );
  return [...base, ...lifted];
}

export function renderInstance(
  instance: InstanceJson,
  settings: DrawSettings,
  mode: RenderMode,
  origPath: string,
): Primitive[] {
  if (!settings.visible) return [];
  const pts = points3(instance);
  if (pts.length === 0) return [];

  const base = {
    color: settings.color,
    width: settings.lineWidth,
    origPath,
    typeName: instance.type,
  };
  const shape = (settings.drawAs ?? (pts.length >= 2 ? "Line" : "Point")).toLowerCase();

  if (shape === "point") {
    return pts.map((position) => ({
      kind: "marker" as const,
      position,
      size: settings.markerSize,
      ...base,
    }));
  }
  if (shape === "polygon") {
    return [{ kind: "polyline", points: pts, closed: true, ...base }];
  }
  if (shape === "prism" && pts.length === 8) {
    let corners = pts;
    if (mode.energyTower && settings.energy !== undefined) {
      const height = mode.energyScale * settings.energy;
      const bottom = pts.slice(0, 4);
      const top = pts.slice(4, 8);
      if (height <= 0) {
        return [{ kind: "polyline", points: bottom, closed: true, ...base }];
      }
      corners = towerCorners(bottom, top, height);
    }
    return [
      {
        kind: "segments",
        segments: BOX_EDGES.map(([a, b]) => [corners[a], corners[b]] as [Vec3, Vec3]),
        ...base,
      },
    ];
  }
  // Line, and the fallback for malformed prisms.
  return [{ kind: "polyline", points: pts, closed: false, ...base }];
}
