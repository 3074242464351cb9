// View state and the request it implies.

import type { InstanceRequestParams } from "./protocol.js";
import type { TypeIndex } from "./model.js";

export type ViewAxis = "X" | "Y" | "Z" | "free";

export interface Camera {
  axis: ViewAxis;
  yaw: number; // radians, used when axis === "free"
  pitch: number;
  zoom: number; // pixels per mm
  panX: number; // screen-space offset in pixels
  panY: number;
}

export function defaultCamera(): Camera {
  return { axis: "Z", yaw: 0.6, pitch: 0.4, zoom: 0.32, panX: 0, panY: 0 };
}

export interface ViewState {
  selectedTypes: Set<string>; // type full names, exact spelling from the tree
  filters: string[]; // predicate strings, e.g. "Energy>100"
  energyTower: boolean;
  energyScale: number; // mm of tower height per MeV
  camera: Camera;
  pickedOrigPath: string | null;
}

export function initialState(): ViewState {
  return {
    selectedTypes: new Set(),
    filters: [],
    energyTower: false,
    energyScale: 0.05,
    camera: defaultCamera(),
    pickedOrigPath: null,
  };
}

/** The instance request implied by the current selection and filter rows.
 * No selection and no filters means an all-empty request: the server
 * returns everything. */
export function buildRequest(state: ViewState): InstanceRequestParams {
  const params: InstanceRequestParams = {};
  if (state.selectedTypes.size > 0) {
    params.typeNames = [...state.selectedTypes].sort();
  }
  const predicates = state.filters.map((f) => f.trim()).filter((f) => f.length > 0);
  if (predicates.length > 0) {
    params.predicates = predicates;
  }
  return params;
}

/** Drop selections that no longer exist in the latest type tree. */
export function reconcileSelection(state: ViewState, types: TypeIndex): void {
  const known = new Map(types.entries.map((e) => [e.fullName.toLowerCase(), e.fullName]));
  const next = new Set<string>();
  for (const name of state.selectedTypes) {
    const canonical = known.get(name.toLowerCase());
    if (canonical !== undefined) next.add(canonical);
  }
  state.selectedTypes = next;
}
