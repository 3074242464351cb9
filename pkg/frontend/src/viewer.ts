// Browser application: wires the client, state, scene, and DOM together.

import { HepRepClient, WireError, webSocketFrameSocket } from "./client.js";
import {
  AttCategory,
  InstanceJson,
  InstanceTreeJson,
  ORIG_PATH,
  TypeIndex,
  formatValue,
  numberOf,
  textOf,
} from "./model.js";
import { pick } from "./camera.js";
import { project } from "./camera.js";
import { Scene, buildScene } from "./scene.js";
import { ViewAxis, ViewState, buildRequest, initialState, reconcileSelection } from "./state.js";

const CATEGORY_ORDER: AttCategory[] = ["Draw", "Physics", "PickAction", "Association"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ViewerApp {
  private state: ViewState = initialState();
  private client: HepRepClient | null = null;
  private types: TypeIndex | null = null;
  private tree: InstanceTreeJson | null = null;
  private scene: Scene | null = null;
  private dragging = false;
  private dragStart: [number, number] = [0, 0];

  private canvas: HTMLCanvasElement;
  private typePanel: HTMLElement;
  private attPanel: HTMLElement;
  private statusBar: HTMLElement;
  private banner: HTMLElement;
  private filterInput: HTMLInputElement;
  private algoSelect: HTMLSelectElement;
  private reportBox: HTMLElement;
  private controls: HTMLButtonElement[] = [];

  constructor(
    private root: HTMLElement,
    private url: string,
  ) {
    this.canvas = el("canvas");
    this.typePanel = el("div", "panel types");
    this.attPanel = el("div", "panel atts");
    this.statusBar = el("div", "status");
    this.banner = el("div", "banner hidden");
    this.filterInput = el("input");
    this.algoSelect = el("select");
    this.reportBox = el("pre", "report");
    this.buildDom();
    this.connect();
  }

  private buildDom(): void {
    const sidebar = el("div", "sidebar");
    sidebar.append(el("h2", undefined, "Types"));
    sidebar.append(this.typePanel);

    sidebar.append(el("h2", undefined, "Filter"));
    this.filterInput.placeholder = 'e.g. Energy>100';
    const applyFilter = el("button", undefined, "Apply");
    applyFilter.onclick = () => {
      this.state.filters = this.filterInput.value.trim() ? [this.filterInput.value.trim()] : [];
      void this.refresh();
    };
    const clearFilter = el("button", undefined, "Clear");
    clearFilter.onclick = () => {
      this.filterInput.value = "";
      this.state.filters = [];
      void this.refresh();
    };
    sidebar.append(this.filterInput, applyFilter, clearFilter);
    this.controls.push(applyFilter, clearFilter);

    sidebar.append(el("h2", undefined, "Event"));
    const nextButton = el("button", undefined, "Next Event");
    nextButton.onclick = () => void this.nextEvent();
    const runButton = el("button", undefined, "Run");
    runButton.onclick = () => void this.runAlgorithm();
    sidebar.append(nextButton, this.algoSelect, runButton, this.reportBox);
    this.controls.push(nextButton, runButton);

    sidebar.append(el("h2", undefined, "View"));
    for (const axis of ["X", "Y", "Z", "free"] as ViewAxis[]) {
      const button = el("button", undefined, axis);
      button.onclick = () => {
        this.state.camera.axis = axis;
        this.draw();
      };
      sidebar.append(button);
    }
    const towerToggle = el("button", undefined, "Energy towers");
    towerToggle.onclick = () => {
      this.state.energyTower = !this.state.energyTower;
      towerToggle.classList.toggle("active", this.state.energyTower);
      this.rebuildScene();
    };
    sidebar.append(towerToggle);

    sidebar.append(el("h2", undefined, "Picked"));
    sidebar.append(this.attPanel);

    const main = el("div", "main");
    this.canvas.width = 900;
    this.canvas.height = 700;
    this.canvas.onmousedown = (event) => {
      this.dragging = true;
      this.dragStart = [event.offsetX, event.offsetY];
    };
    this.canvas.onmouseup = (event) => {
      this.dragging = false;
      const dx = event.offsetX - this.dragStart[0];
      const dy = event.offsetY - this.dragStart[1];
      if (Math.hypot(dx, dy) < 3) this.pickAt(event.offsetX, event.offsetY);
    };
    this.canvas.onmousemove = (event) => {
      if (!this.dragging || this.state.camera.axis !== "free") return;
      this.state.camera.yaw += event.movementX * 0.01;
      this.state.camera.pitch += event.movementY * 0.01;
      this.draw();
    };
    this.canvas.onwheel = (event) => {
      event.preventDefault();
      this.state.camera.zoom *= event.deltaY < 0 ? 1.1 : 0.9;
      this.draw();
    };
    main.append(this.banner, this.canvas, this.statusBar);
    this.root.append(sidebar, main);
  }

  private connect(): void {
    this.banner.classList.add("hidden");
    this.client = new HepRepClient(webSocketFrameSocket(this.url));
    this.client.onDisconnect = () => this.onDisconnect();
    void this.client.ready().then(() => this.bootstrap());
  }

  private onDisconnect(): void {
    for (const control of this.controls) control.disabled = true;
    this.banner.classList.remove("hidden");
    this.banner.textContent = "Disconnected. ";
    const retry = el("button", undefined, "Reconnect");
    retry.onclick = () => this.connect();
    this.banner.append(retry);
  }

  private async bootstrap(): Promise<void> {
    if (!this.client) return;
    for (const control of this.controls) control.disabled = false;
    const [status, tree, algorithms] = await Promise.all([
      this.client.status(),
      this.client.getTypeTree(),
      this.client.listAlgorithms(),
    ]);
    this.types = new TypeIndex(tree);
    reconcileSelection(this.state, this.types);
    this.renderTypePanel();
    this.algoSelect.replaceChildren(
      ...algorithms.map((name) => {
        const option = el("option", undefined, name);
        option.value = name;
        return option;
      }),
    );
    this.setStatus(`event ${status.eventId} | seed ${status.seed}`);
    await this.refresh();
  }

  private renderTypePanel(): void {
    if (!this.types) return;
    this.typePanel.replaceChildren();
    for (const entry of this.types.entries) {
      const row = el("label", "type-row");
      row.style.paddingLeft = `${(entry.fullName.split("/").length - 1) * 16}px`;
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.state.selectedTypes.has(entry.fullName);
      box.onchange = () => {
        if (box.checked) this.state.selectedTypes.add(entry.fullName);
        else this.state.selectedTypes.delete(entry.fullName);
        void this.refresh();
      };
      row.append(box, entry.fullName);
      this.typePanel.append(row);
    }
  }

  async refresh(): Promise<void> {
    if (!this.client) return;
    try {
      this.tree = await this.client.getInstances(buildRequest(this.state));
    } catch (error) {
      this.setStatus(error instanceof WireError ? error.message : String(error));
      return;
    }
    this.rebuildScene();
  }

  private rebuildScene(): void {
    if (!this.types || !this.tree) return;
    this.scene = buildScene(this.types, this.tree, {
      energyTower: this.state.energyTower,
      energyScale: this.state.energyScale,
    });
    this.draw();
  }

  private viewport() {
    return { width: this.canvas.width, height: this.canvas.height };
  }

  private draw(): void {
    const context = this.canvas.getContext("2d");
    if (!context || !this.scene) return;
    context.fillStyle = "#10141a";
    context.fillRect(0, 0, this.canvas.width, this.canvas.height);
    const viewport = this.viewport();
    for (const primitive of this.scene.primitives) {
      const picked = primitive.origPath === this.state.pickedOrigPath;
      const [r, g, b] = primitive.color;
      context.strokeStyle = picked
        ? "#ffffff"
        : `rgb(${Math.round(r * 255)},${Math.round(g * 255)},${Math.round(b * 255)})`;
      context.fillStyle = context.strokeStyle;
      context.lineWidth = primitive.width * (picked ? 2 : 1);
      if (primitive.kind === "marker") {
        const [sx, sy] = project(primitive.position, this.state.camera, viewport);
        context.beginPath();
        context.arc(sx, sy, primitive.size / 2 + (picked ? 2 : 0), 0, Math.PI * 2);
        context.fill();
      } else if (primitive.kind === "polyline") {
        context.beginPath();
        primitive.points.forEach((p, i) => {
          const [sx, sy] = project(p, this.state.camera, viewport);
          if (i === 0) context.moveTo(sx, sy);
          else context.lineTo(sx, sy);
        });
        if (primitive.closed) context.closePath();
        context.stroke();
      } else {
        context.beginPath();
        for (const [a, b2] of primitive.segments) {
          const [ax, ay] = project(a, this.state.camera, viewport);
          const [bx, by] = project(b2, this.state.camera, viewport);
          context.moveTo(ax, ay);
          context.lineTo(bx, by);
        }
        context.stroke();
      }
    }
  }

  private pickAt(x: number, y: number): void {
    if (!this.scene || !this.types) return;
    const hit = pick(this.scene.primitives, [x, y], this.state.camera, this.viewport());
    this.state.pickedOrigPath = hit ? hit.primitive.origPath : null;
    this.renderAttPanel();
    this.draw();
  }

  private renderAttPanel(): void {
    this.attPanel.replaceChildren();
    if (!this.types || !this.scene || this.state.pickedOrigPath === null) return;
    const instance = this.scene.byOrigPath.get(this.state.pickedOrigPath);
    if (!instance) return;
    this.attPanel.append(el("div", "att-type", instance.type));
    const resolved = this.types.resolveAll(instance);
    for (const category of CATEGORY_ORDER) {
      const rows = resolved.filter((r) => (r.def?.category ?? "Physics") === category);
      if (rows.length === 0) continue;
      this.attPanel.append(el("h3", undefined, category));
      for (const row of rows) {
        if (category === "PickAction") {
          const button = el("button", undefined, row.value.name);
          button.onclick = () => void this.fireAction(row.value.name, instance);
          this.attPanel.append(button);
        } else {
          const units = row.def?.units ? ` ${row.def.units}` : "";
          this.attPanel.append(
            el("div", "att-row", `${row.value.name} = ${formatValue(row.value)}${units}`),
          );
        }
      }
    }
  }

  private async fireAction(name: string, instance: InstanceJson): Promise<void> {
    if (!this.client || !this.types) return;
    const orig = textOf(this.types.resolve(instance, ORIG_PATH));
    if (orig === undefined) return;
    let targetPath = orig;
    const args: Record<string, unknown> = {};
    if (name === "removeHitAndRefit") {
      const hitIndex = numberOf(this.types.resolve(instance, "HitIndex"));
      if (hitIndex !== undefined && orig.includes("/")) {
        targetPath = orig.slice(0, orig.lastIndexOf("/")); // act on the parent track
        args.hitIndex = hitIndex;
      } else {
        args.hitIndex = 0;
      }
    }
    try {
      this.tree = await this.client.getInstancesAfterAction(buildRequest(this.state), {
        name,
        targetPath,
        args,
      });
      this.state.pickedOrigPath = null;
      this.rebuildScene();
      this.renderAttPanel();
    } catch (error) {
      this.setStatus(error instanceof WireError ? error.message : String(error));
    }
  }

  private async nextEvent(): Promise<void> {
    if (!this.client) return;
    const { eventId } = await this.client.nextEvent();
    this.state.pickedOrigPath = null;
    this.setStatus(`event ${eventId}`);
    await this.refresh();
    this.renderAttPanel();
  }

  private async runAlgorithm(): Promise<void> {
    if (!this.client || !this.algoSelect.value) return;
    const report = await this.client.runAlgorithm(this.algoSelect.value);
    this.reportBox.textContent = `${report.name}: ${report.report}`;
    await this.refresh();
  }

  private setStatus(text: string): void {
    this.statusBar.textContent = text;
  }
}

export function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const host = location.hostname || "127.0.0.1";
  const port = new URLSearchParams(location.search).get("port") ?? "7708";
  new ViewerApp(root, `ws://${host}:${port}/heprep`);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
