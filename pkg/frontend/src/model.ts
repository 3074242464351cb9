// JSON document shapes served over the wire (mirroring the XML dialect)
// and client-side attribute resolution.
//
// Resolution re-implements the server's order so attributes excluded from
// a download or defaulted at type level still display correctly: instance
// attvalues first (within one scope the last name match wins), then the
// instance's own type, then its ancestor types toward the root. Name
// comparison is case-insensitive.

export type AttKind = "text" | "int" | "real" | "bool" | "color";
export type AttCategory = "Draw" | "Physics" | "PickAction" | "Association";

export interface AttValueJson {
  name: string;
  kind: AttKind;
  value: string | number | boolean;
}

export interface AttDefJson {
  name: string;
  desc?: string;
  category: AttCategory;
  kind: AttKind;
  units?: string;
}

export interface TypeJson {
  name: string;
  attdefs?: AttDefJson[];
  attvalues?: AttValueJson[];
  types?: TypeJson[];
}

export interface TypeTreeJson {
  name: string;
  version: string;
  types?: TypeJson[];
}

export interface PointJson {
  x: number;
  y: number;
  z: number;
  attvalues?: AttValueJson[];
}

export interface InstanceJson {
  type: string;
  attvalues?: AttValueJson[];
  points?: PointJson[];
  instances?: InstanceJson[];
}

export interface InstanceTreeJson {
  name: string;
  version: string;
  typetreename: string;
  typetreeversion: string;
  instances?: InstanceJson[];
}

export interface TreeTopRootJson {
  type: string;
  descendants: number;
}

export interface TreeTopJson {
  name: string;
  version: string;
  typetreename: string;
  typetreeversion: string;
  roots: TreeTopRootJson[];
}

export const ORIG_PATH = "origPath";

function lastMatch(values: AttValueJson[] | undefined, low: string): AttValueJson | undefined {
  let hit: AttValueJson | undefined;
  for (const att of values ?? []) {
    if (att.name.toLowerCase() === low) hit = att;
  }
  return hit;
}

export interface TypeEntry {
  fullName: string;
  node: TypeJson;
  chain: TypeJson[]; // root .. node
}

export class TypeIndex {
  private byLowerFull = new Map<string, TypeEntry>();
  readonly entries: TypeEntry[] = [];

  constructor(tree: TypeTreeJson) {
    const walk = (nodes: TypeJson[] | undefined, prefix: string, chain: TypeJson[]) => {
      for (const node of nodes ?? []) {
        const full = prefix ? `${prefix}/${node.name}` : node.name;
        const entry = { fullName: full, node, chain: [...chain, node] };
        this.byLowerFull.set(full.toLowerCase(), entry);
        this.entries.push(entry);
        walk(node.types, full, entry.chain);
      }
    };
    walk(tree.types, "", []);
  }

  entry(fullName: string): TypeEntry | undefined {
    return this.byLowerFull.get(fullName.toLowerCase());
  }

  resolve(instance: InstanceJson, name: string): AttValueJson | undefined {
    const low = name.toLowerCase();
    const own = lastMatch(instance.attvalues, low);
    if (own !== undefined) return own;
    const entry = this.entry(instance.type);
    if (entry) {
      for (let i = entry.chain.length - 1; i >= 0; i--) {
        const hit = lastMatch(entry.chain[i].attvalues, low);
        if (hit !== undefined) return hit;
      }
    }
    return undefined;
  }

  defFor(typeFullName: string, attName: string): AttDefJson | undefined {
    const entry = this.entry(typeFullName);
    if (!entry) return undefined;
    const low = attName.toLowerCase();
    for (let i = entry.chain.length - 1; i >= 0; i--) {
      for (const def of entry.chain[i].attdefs ?? []) {
        if (def.name.toLowerCase() === low) return def;
      }
    }
    return undefined;
  }

  /** Every name resolvable for the instance, with its value and definition. */
  resolveAll(instance: InstanceJson): { def?: AttDefJson; value: AttValueJson }[] {
    const names = new Map<string, string>(); // lower -> display name
    const note = (name: string) => {
      const low = name.toLowerCase();
      if (!names.has(low)) names.set(low, name);
    };
    const entry = this.entry(instance.type);
    for (const node of entry?.chain ?? []) {
      for (const def of node.attdefs ?? []) note(def.name);
      for (const att of node.attvalues ?? []) note(att.name);
    }
    for (const att of instance.attvalues ?? []) note(att.name);
    const out: { def?: AttDefJson; value: AttValueJson }[] = [];
    for (const [, display] of names) {
      const value = this.resolve(instance, display);
      if (value !== undefined) {
        out.push({ def: this.defFor(instance.type, display), value });
      }
    }
    return out;
  }
}

export type RGB = [number, number, number];

export function parseColor(value: AttValueJson | undefined): RGB | undefined {
  if (!value || value.kind !== "color" || typeof value.value !== "string") return undefined;
  const parts = value.value.split(",").map(Number);
  if (parts.length !== 3 || parts.some((c) => Number.isNaN(c))) return undefined;
  return [parts[0], parts[1], parts[2]];
}

export function numberOf(value: AttValueJson | undefined): number | undefined {
  if (!value) return undefined;
  if (value.kind === "real" || value.kind === "int") return Number(value.value);
  return undefined;
}

export function textOf(value: AttValueJson | undefined): string | undefined {
  if (!value || typeof value.value !== "string") return undefined;
  return value.value;
}

export function boolOf(value: AttValueJson | undefined): boolean | undefined {
  if (!value || value.kind !== "bool") return undefined;
  return value.value === true;
}

export function formatValue(value: AttValueJson): string {
  if (value.kind === "bool") return value.value ? "true" : "false";
  return String(value.value);
}

/** Walk instances depth-first with their path in the received tree. */
export function walkInstances(
  tree: InstanceTreeJson,
  visit: (instance: InstanceJson, path: number[]) => void,
): void {
  const walk = (nodes: InstanceJson[] | undefined, prefix: number[]) => {
    (nodes ?? []).forEach((node, i) => {
      const path = [...prefix, i];
      visit(node, path);
      walk(node.instances, path);
    });
  };
  walk(tree.instances, []);
}
