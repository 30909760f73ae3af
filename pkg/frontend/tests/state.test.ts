import { describe, expect, it } from "vitest";

import {
  applyTick,
  initialState,
  isStale,
  logCommand,
  robotCount,
  setSocket,
  STALE_AFTER_MS,
} from "../src/state.js";
import type { TickEvent } from "../src/types.js";

function tick(tMs: number, robots = 1): TickEvent {
  return {
    event: "tick",
    t_ms: tMs,
    robots: Array.from({ length: robots }, (_, i) => ({
      id: `swarm_${String(i).padStart(2, "0")}`,
      kind: "wheeled",
      x: 24.5 + (i % 5),
      y: 40.5 + Math.floor(i / 5),
      z: 0,
      yaw: 0,
    })),
    plant: { t_avg_c: 317.27 },
  };
}

describe("applyTick", () => {
  it("keeps the latest event", () => {
    let state = initialState();
    state = applyTick(state, tick(50), 1000);
    state = applyTick(state, tick(100), 1100);
    expect(state.lastTick?.t_ms).toBe(100);
  });

  it("drops stale or duplicate t_ms", () => {
    let state = initialState();
    state = applyTick(state, tick(100), 1000);
    const after = applyTick(state, tick(100), 1100);
    expect(after).toBe(state);
    expect(applyTick(state, tick(50), 1200)).toBe(state);
  });

  it("carries twenty swarm robots through to the marker count", () => {
    let state = initialState();
    state = applyTick(state, tick(100, 20), 1000);
    expect(robotCount(state)).toBe(20);
  });
});

describe("staleness", () => {
  it("stale until connected and ticking", () => {
    let state = initialState();
    expect(isStale(state, 0)).toBe(true);
    state = setSocket(state, "connected");
    expect(isStale(state, 0)).toBe(true);
    state = applyTick(state, tick(100), 1000);
    expect(isStale(state, 1500)).toBe(false);
  });

  it("goes stale after two seconds without ticks", () => {
    let state = setSocket(initialState(), "connected");
    state = applyTick(state, tick(100), 1000);
    expect(isStale(state, 1000 + STALE_AFTER_MS)).toBe(false);
    expect(isStale(state, 1001 + STALE_AFTER_MS)).toBe(true);
  });

  it("disconnect is always stale", () => {
    let state = setSocket(initialState(), "connected");
    state = applyTick(state, tick(100), 1000);
    state = setSocket(state, "disconnected");
    expect(isStale(state, 1001)).toBe(true);
  });
});

describe("command log", () => {
  it("appends entries with gesture and command", () => {
    let state = initialState();
    state = logCommand(state, "key:ArrowUp", "vset /robot/r1/move forward", 1000);
    expect(state.commandLog).toHaveLength(1);
    expect(state.commandLog[0].cmd).toBe("vset /robot/r1/move forward");
  });
});
