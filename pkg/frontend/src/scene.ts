// Building the drawable scene from a received instance tree.

import {
  InstanceJson,
  InstanceTreeJson,
  ORIG_PATH,
  TypeIndex,
  boolOf,
  numberOf,
  parseColor,
  textOf,
  walkInstances,
} from "./model.js";
import {
  DEFAULT_COLOR,
  DrawSettings,
  Primitive,
  RenderMode,
  renderInstance,
} from "./render.js";

export interface SceneStats {
  instances: number; // instances received, skeletons included
  drawable: number; // instances that produced primitives
  points: number;
  primitives: number;
}

export interface Scene {
  primitives: Primitive[];
  stats: SceneStats;
  /** origPath -> instance, for the pick panel. */
  byOrigPath: Map<string, InstanceJson>;
}

export function drawSettingsFor(types: TypeIndex, instance: InstanceJson): DrawSettings {
  return {
    drawAs: textOf(types.resolve(instance, "DrawAs")),
    color: parseColor(types.resolve(instance, "Color")) ?? DEFAULT_COLOR,
    lineWidth: numberOf(types.resolve(instance, "LineWidth")) ?? 1,
    markerSize: numberOf(types.resolve(instance, "MarkerSize")) ?? 3,
    visible: boolOf(types.resolve(instance, "Visibility")) ?? true,
    energy: numberOf(types.resolve(instance, "Energy")),
  };
}

export function buildScene(
  types: TypeIndex,
  tree: InstanceTreeJson,
  mode: RenderMode,
): Scene {
  const primitives: Primitive[] = [];
  const byOrigPath = new Map<string, InstanceJson>();
  const stats: SceneStats = { instances: 0, drawable: 0, points: 0, primitives: 0 };

  walkInstances(tree, (instance, path) => {
    stats.instances += 1;
    stats.points += instance.points?.length ?? 0;
    const orig = textOf(types.resolve(instance, ORIG_PATH)) ?? path.join("/");
    byOrigPath.set(orig, instance);
    const produced = renderInstance(instance, drawSettingsFor(types, instance), mode, orig);
    if (produced.length > 0) stats.drawable += 1;
    stats.primitives += produced.length;
    primitives.push(...produced);
  });

  return { primitives, stats, byOrigPath };
}
