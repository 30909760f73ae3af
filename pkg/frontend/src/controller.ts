// The gesture-to-command controller: everything the UI can do funnels
// through here, so "every user gesture maps to exactly one documented
// bridge command" is enforceable (and tested) in one place.

import { markersFor, nearestRobot, type Marker } from "./mapview.js";
import {
  possessCommand,
  topdownCommand,
  traceCommand,
} from "./protocol.js";
import { sliderCommand } from "./plantpanel.js";
import {
  applyTick,
  initialState,
  isStale,
  logCommand,
  setPossessed,
  setSocket,
  toggleViewMode,
  type ConsoleState,
} from "./state.js";
import { keyToCommand } from "./teleop.js";
import type { SocketStatus, TickEvent } from "./types.js";

// Returns the request id when the transport accepted the command.
export type SendFn = (cmd: string) => number | null;

export class ConsoleController {
  state: ConsoleState = initialState();
  hint: string | null = null;

  constructor(private readonly send: SendFn, private readonly now: () => number = Date.now) {}

  private issue(gesture: string, cmd: string): number | null {
    this.state = logCommand(this.state, gesture, cmd, this.now());
    return this.send(cmd);
  }

  onSocket(status: SocketStatus): void {
    this.state = setSocket(this.state, status);
    if (status !== "connected") {
      // Commands are disabled while disconnected; possession died with
      // the session server-side.
      this.state = setPossessed(this.state, null);
    }
  }

  onTick(event: TickEvent): void {
    this.state = applyTick(this.state, event, this.now());
  }

  onKey(key: string): void {
    if (this.state.socket !== "connected") {
      this.hint = "disconnected";
      return;
    }
    const possessed = this.state.possessed;
    const kind =
      this.state.lastTick?.robots.find((r) => r.id === possessed)?.kind ?? null;
    const result = keyToCommand(key, possessed, kind);
    this.hint = result.hint;
    if (result.cmd !== null && result.gesture !== null) {
      this.issue(result.gesture, result.cmd);
    }
  }

  clickMap(xM: number, yM: number): void {
    if (this.state.socket !== "connected" || this.state.lastTick === null) return;
    const robot = nearestRobot(this.state.lastTick.robots, xM, yM);
    if (robot === null) return;
    this.state = setPossessed(this.state, robot.id);
    this.issue(`click:robot:${robot.id}`, possessCommand(robot.id));
  }

  onSlider(name: string, value: number): void {
    if (this.state.socket !== "connected") return;
    this.issue(`slider:${name}`, sliderCommand(name, value));
  }

  toggleTrace(robotId: string, enabled: boolean): void {
    if (this.state.socket !== "connected") return;
    this.issue(`toggle:trace:${robotId}`, traceCommand(robotId, enabled));
  }

  toggleThermal(): void {
    this.state = toggleViewMode(this.state);
  }

  requestTopdown(): number | null {
    return this.issue("view:topdown", topdownCommand(this.state.viewMode));
  }

  markers(pxPerM: number): Marker[] {
    return markersFor(this.state.lastTick?.robots ?? [], pxPerM);
  }

  stale(): boolean {
    return isStale(this.state, this.now());
  }
}
