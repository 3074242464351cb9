// Wire client: promise-per-request with id matching over a socket that
// delivers one frame per message. Works over a browser WebSocket or any
// adapter implementing FrameSocket (node tests use the "ws" package).

import {
  ActionParams,
  InstanceRequestParams,
  ResponseFrame,
  decodeFrame,
  encodeFrame,
} from "./protocol.js";
import type { InstanceTreeJson, TreeTopJson, TypeTreeJson } from "./model.js";

export interface FrameSocket {
  send(text: string): void;
  close(): void;
  onMessage(handler: (text: string) => void): void;
  onOpen(handler: () => void): void;
  onClose(handler: () => void): void;
}

export class WireError extends Error {
  constructor(
    readonly code: number,
    message: string,
  ) {
    super(`[${code}] ${message}`);
  }
}

interface Pending {
  resolve: (value: unknown) => void;
  reject: (reason: Error) => void;
}

export interface StatusResult {
  eventId: number;
  seed: number;
  protocolVersion: string;
}

export interface AlgorithmResult {
  name: string;
  status: string;
  report: string;
}

export interface ActionListing {
  name: string;
  args: Record<string, string>;
}

export class HepRepClient {
  private nextId = 1;
  private pending = new Map<number, Pending>();
  private open = false;
  private openWaiters: (() => void)[] = [];
  /** Responses that matched no pending request (should stay 0). */
  unexpectedFrames = 0;
  onDisconnect: (() => void) | null = null;

  constructor(private socket: FrameSocket) {
    socket.onMessage((text) => this.dispatch(text));
    socket.onOpen(() => {
      this.open = true;
      for (const wake of this.openWaiters.splice(0)) wake();
    });
    socket.onClose(() => {
      this.open = false;
      const error = new WireError(0, "connection closed");
      for (const [, waiter] of this.pending) waiter.reject(error);
      this.pending.clear();
      this.onDisconnect?.();
    });
  }

  ready(): Promise<void> {
    if (this.open) return Promise.resolve();
    return new Promise((resolve) => this.openWaiters.push(resolve));
  }

  close(): void {
    this.socket.close();
  }

  private dispatch(text: string): void {
    let frame: ResponseFrame;
    try {
      frame = decodeFrame(text);
    } catch {
      this.unexpectedFrames += 1;
      return;
    }
    const waiter = frame.id !== null ? this.pending.get(frame.id) : undefined;
    if (!waiter) {
      this.unexpectedFrames += 1;
      return;
    }
    this.pending.delete(frame.id as number);
    if (frame.error) {
      waiter.reject(new WireError(frame.error.code, frame.error.message));
    } else {
      waiter.resolve(frame.result);
    }
  }

  call(method: string, params?: Record<string, unknown>): Promise<unknown> {
    const id = this.nextId++;
    const frame = encodeFrame({ id, method, params: params ?? {} });
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      try {
        this.socket.send(frame);
      } catch (error) {
        this.pending.delete(id);
        reject(error instanceof Error ? error : new Error(String(error)));
      }
    });
  }

  // Typed conveniences for the protocol surface the viewer uses.

  getTypeTree(): Promise<TypeTreeJson> {
    return this.call("heprep.getTypeTree") as Promise<TypeTreeJson>;
  }

  getInstances(request: InstanceRequestParams): Promise<InstanceTreeJson> {
    return this.call("heprep.getInstances", { ...request }) as Promise<InstanceTreeJson>;
  }

  getInstanceTreeTop(request: InstanceRequestParams): Promise<TreeTopJson> {
    return this.call("heprep.getInstanceTreeTop", { ...request }) as Promise<TreeTopJson>;
  }

  getInstancesAfterAction(
    request: InstanceRequestParams,
    action: ActionParams,
  ): Promise<InstanceTreeJson> {
    return this.call("heprep.getInstancesAfterAction", {
      ...request,
      action,
    }) as Promise<InstanceTreeJson>;
  }

  nextEvent(): Promise<{ eventId: number }> {
    return this.call("control.nextEvent") as Promise<{ eventId: number }>;
  }

  status(): Promise<StatusResult> {
    return this.call("control.status") as Promise<StatusResult>;
  }

  listAlgorithms(): Promise<string[]> {
    return this.call("control.listAlgorithms").then(
      (r) => (r as { algorithms: string[] }).algorithms,
    );
  }

  listActions(): Promise<ActionListing[]> {
    return this.call("control.listActions").then(
      (r) => (r as { actions: ActionListing[] }).actions,
    );
  }

  runAlgorithm(name: string): Promise<AlgorithmResult> {
    return this.call("control.runAlgorithm", { name }) as Promise<AlgorithmResult>;
  }
}

export function webSocketFrameSocket(url: string): FrameSocket {
  const ws = new WebSocket(url);
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onMessage: (handler) =>
      ws.addEventListener("message", (event) => handler(String(event.data))),
    onOpen: (handler) => ws.addEventListener("open", () => handler()),
    onClose: (handler) => ws.addEventListener("close", () => handler()),
  };
}
