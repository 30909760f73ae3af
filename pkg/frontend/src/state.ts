// Console state: a pure reducer over gateway events. The console holds
// no simulation truth of its own -- everything rendered comes from
// received events, and closing the page changes nothing server-side.

import type { CommandLogEntry, SocketStatus, TickEvent, ViewMode } from "./types.js";

export const STALE_AFTER_MS = 2000;
export const COMMAND_LOG_CAP = 200;

export interface ConsoleState {
  socket: SocketStatus;
  lastTick: TickEvent | null;
  lastTickWallMs: number | null;
  possessed: string | null;
  viewMode: ViewMode;
  commandLog: CommandLogEntry[];
}

export function initialState(): ConsoleState {
  return {
    socket: "connecting",
    lastTick: null,
    lastTickWallMs: null,
    possessed: null,
    viewMode: "lit",
    commandLog: [],
  };
}

export function setSocket(state: ConsoleState, status: SocketStatus): ConsoleState {
  return { ...state, socket: status };
}

export function applyTick(state: ConsoleState, event: TickEvent, wallMs: number): ConsoleState {
  // Events must move forward; a stale or duplicate tick is dropped.
  if (state.lastTick !== null && event.t_ms <= state.lastTick.t_ms) {
    return state;
  }
  return { ...state, lastTick: event, lastTickWallMs: wallMs };
}

export function setPossessed(state: ConsoleState, robotId: string | null): ConsoleState {
  return { ...state, possessed: robotId };
}

export function toggleViewMode(state: ConsoleState): ConsoleState {
  return { ...state, viewMode: state.viewMode === "lit" ? "thermal" : "lit" };
}

export function isStale(state: ConsoleState, nowWallMs: number): boolean {
  if (state.socket !== "connected") return true;
  if (state.lastTickWallMs === null) return true;
  return nowWallMs - state.lastTickWallMs > STALE_AFTER_MS;
}

export function logCommand(
  state: ConsoleState,
  gesture: string,
  cmd: string,
  wallMs: number,
): ConsoleState {
  const entry: CommandLogEntry = { gesture, cmd, wallMs };
  const log = [...state.commandLog, entry];
  if (log.length > COMMAND_LOG_CAP) {
    log.splice(0, log.length - COMMAND_LOG_CAP);
  }
  return { ...state, commandLog: log };
}

export function robotCount(state: ConsoleState): number {
  return state.lastTick?.robots.length ?? 0;
}

export function plantValue(state: ConsoleState, name: string): number | null {
  const value = state.lastTick?.plant[name];
  return value === undefined ? null : value;
}
