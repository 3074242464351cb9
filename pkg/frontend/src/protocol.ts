// Frame types and helpers for the wire protocol: one JSON object per
// WebSocket message, responses echo the request id.

export interface RequestFrame {
  id: number;
  method: string;
  params?: Record<string, unknown>;
}

export interface ErrorPayload {
  code: number;
  message: string;
}

export interface ResponseFrame {
  id: number | null;
  result?: unknown;
  error?: ErrorPayload;
}

export const ERR_PARSE = 1;
export const ERR_UNKNOWN_METHOD = 2;
export const ERR_BAD_PARAMS = 3;
export const ERR_INVALID_PATH = 4;
export const ERR_UNKNOWN_ACTION = 5;
export const ERR_ACTION_FAILED = 6;

export function encodeFrame(frame: RequestFrame): string {
  return JSON.stringify(frame);
}

export function decodeFrame(text: string): ResponseFrame {
  const payload = JSON.parse(text) as ResponseFrame;
  if (typeof payload !== "object" || payload === null) {
    throw new Error("response frame is not an object");
  }
  return payload;
}

// The instance request as the server expects it; empty fields are omitted
// so an unfiltered request is just {}.
export interface InstanceRequestParams {
  typeNames?: string[];
  attIncludes?: string[];
  attExcludes?: string[];
  predicates?: string[];
  maxDepth?: number;
}

export interface ActionParams {
  name: string;
  targetPath: string;
  args: Record<string, unknown>;
}
