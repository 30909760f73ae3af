// Gateway message encoding/decoding and bridge command builders.
// The console never invents values: every command body here is one of
// the documented bridge commands, byte for byte.

import type { GatewayResponse, TickEvent } from "./types.js";

export function buildRequest(id: number, cmd: string): string {
  return JSON.stringify({ id, cmd });
}

export type ParsedMessage =
  | { kind: "tick"; event: TickEvent }
  | { kind: "response"; response: GatewayResponse }
  | { kind: "invalid"; raw: string };

export function parseMessage(text: string): ParsedMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return { kind: "invalid", raw: text };
  }
  if (typeof data !== "object" || data === null) {
    return { kind: "invalid", raw: text };
  }
  const obj = data as Record<string, unknown>;
  if (obj["event"] === "tick") {
    if (typeof obj["t_ms"] === "number" && Array.isArray(obj["robots"])) {
      return { kind: "tick", event: obj as unknown as TickEvent };
    }
    return { kind: "invalid", raw: text };
  }
  if (obj["status"] === "ok" || obj["status"] === "error") {
    return { kind: "response", response: obj as unknown as GatewayResponse };
  }
  return { kind: "invalid", raw: text };
}

// -- command builders --------------------------------------------------

export function possessCommand(robotId: string): string {
  return `vset /session/possess ${robotId}`;
}

export function moveCommand(robotId: string, direction: "forward" | "backward"): string {
  return `vset /robot/${robotId}/move ${direction}`;
}

export function rotateCommand(robotId: string, direction: "left" | "right"): string {
  return `vset /robot/${robotId}/rotate ${direction}`;
}

export function altitudeCommand(robotId: string, direction: "up" | "down"): string {
  return `vset /robot/${robotId}/altitude ${direction}`;
}

export function traceCommand(robotId: string, enabled: boolean): string {
  return `vset /robot/${robotId}/trace ${enabled ? "on" : "off"}`;
}

export function compassCommand(robotId: string): string {
  return `vget /robot/${robotId}/compass`;
}

export function topdownCommand(mode: "lit" | "thermal"): string {
  return `vget /topdown ${mode}`;
}

export function plantSetCommand(name: string, value: number): string {
  return `vset /plant/${name} ${formatDecimal(value)}`;
}

export function plantGetCommand(name: string): string {
  return `vget /plant/${name}`;
}

export function formatDecimal(value: number): string {
  // The bridge grammar takes plain decimals; keep them short and exact
  // enough for setpoints (sliders quantize to 1e-3 anyway).
  if (!Number.isFinite(value)) {
    throw new Error(`cannot encode ${value} as a decimal`);
  }
  const text = String(value);
  return text.includes("e") || text.includes("E") ? value.toFixed(6) : text;
}
