// Hand-built document fixtures shared by the unit tests.

import type { InstanceJson, InstanceTreeJson, TypeTreeJson } from "../src/model.js";

export const TYPE_TREE: TypeTreeJson = {
  name: "types",
  version: "1.0",
  types: [
    {
      name: "Track",
      attdefs: [
        { name: "DrawAs", category: "Draw", kind: "text" },
        { name: "Color", category: "Draw", kind: "color" },
        { name: "LineWidth", category: "Draw", kind: "real", units: "pixels" },
        { name: "Momentum", category: "Physics", kind: "real", units: "MeV" },
        { name: "Chi2", category: "Physics", kind: "real" },
        { name: "removeHitAndRefit", category: "PickAction", kind: "text" },
        { name: "origPath", category: "Association", kind: "text" },
        { name: "TrackIndex", category: "Association", kind: "int" },
      ],
      attvalues: [
        { name: "DrawAs", kind: "text", value: "Line" },
        { name: "Color", kind: "color", value: "0,0.9,0.9" },
        { name: "LineWidth", kind: "real", value: 2 },
        { name: "removeHitAndRefit", kind: "text", value: "hitIndex:int" },
      ],
      types: [
        {
          name: "TrackHit",
          attdefs: [
            { name: "MarkerSize", category: "Draw", kind: "real", units: "pixels" },
            { name: "HitIndex", category: "Association", kind: "int" },
          ],
          attvalues: [
            { name: "DrawAs", kind: "text", value: "Point" },
            { name: "MarkerSize", kind: "real", value: 4 },
          ],
        },
      ],
    },
    {
      name: "CalCrystal",
      attdefs: [
        { name: "DrawAs", category: "Draw", kind: "text" },
        { name: "Energy", category: "Physics", kind: "real", units: "MeV" },
        { name: "Visibility", category: "Draw", kind: "bool" },
        { name: "origPath", category: "Association", kind: "text" },
      ],
      attvalues: [{ name: "DrawAs", kind: "text", value: "Prism" }],
    },
  ],
};

export const UNIT_BOX: [number, number, number][] = [
  [0, 0, 0],
  [1, 0, 0],
  [1, 1, 0],
  [0, 1, 0],
  [0, 0, 1],
  [1, 0, 1],
  [1, 1, 1],
  [0, 1, 1],
];

export function crystal(energy: number, origPath = "5"): InstanceJson {
  return {
    type: "CalCrystal",
    attvalues: [
      { name: "Energy", kind: "real", value: energy },
      { name: "origPath", kind: "text", value: origPath },
    ],
    points: UNIT_BOX.map(([x, y, z]) => ({ x, y, z })),
  };
}

export function track(origPath = "0"): InstanceJson {
  return {
    type: "Track",
    attvalues: [
      { name: "Momentum", kind: "real", value: 120.5 },
      { name: "Chi2", kind: "real", value: 0.25 },
      { name: "TrackIndex", kind: "int", value: 0 },
      { name: "origPath", kind: "text", value: origPath },
    ],
    points: [
      { x: 0, y: 0, z: 50 },
      { x: 1, y: 1, z: 100 },
      { x: 2, y: 2, z: 150 },
    ],
    instances: [
      {
        type: "Track/TrackHit",
        attvalues: [
          { name: "HitIndex", kind: "int", value: 0 },
          { name: "origPath", kind: "text", value: `${origPath}/0` },
        ],
        points: [{ x: 0, y: 0, z: 50 }],
      },
    ],
  };
}

export function instanceTree(instances: InstanceJson[]): InstanceTreeJson {
  return {
    name: "event-1",
    version: "1.0",
    typetreename: "types",
    typetreeversion: "1.0",
    instances,
  };
}
