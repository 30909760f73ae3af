import { describe, expect, it } from "vitest";

import { ConsoleController } from "../src/controller.js";
import { trendSign } from "../src/plantpanel.js";
import type { TickEvent } from "../src/types.js";

function swarmTick(tMs: number, n = 20, plant: Record<string, number> = {}): TickEvent {
  return {
    event: "tick",
    t_ms: tMs,
    robots: Array.from({ length: n }, (_, i) => ({
      id: `swarm_${String(i).padStart(2, "0")}`,
      kind: "wheeled",
      x: 24.5 + (i % 5),
      y: 40.5 + Math.floor(i / 5),
      z: 0,
      yaw: 0,
    })),
    plant,
  };
}

function connected(sent: string[], nowRef = { t: 1000 }): ConsoleController {
  const controller = new ConsoleController(
    (cmd) => {
      sent.push(cmd);
      return sent.length;
    },
    () => nowRef.t,
  );
  controller.onSocket("connected");
  return controller;
}

describe("swarm monitoring", () => {
  it("a 20-bot tick event yields 20 markers", () => {
    const sent: string[] = [];
    const controller = connected(sent);
    controller.onTick(swarmTick(100));
    expect(controller.markers(8)).toHaveLength(20);
    expect(sent).toHaveLength(0); // monitoring sends nothing
  });
});

describe("teleop gestures", () => {
  it("keypress emits exactly one move command after possession", () => {
    const sent: string[] = [];
    const controller = connected(sent);
    controller.onTick(swarmTick(100));
    controller.clickMap(24.5, 40.5); // possess swarm_00
    expect(sent).toEqual(["vset /session/possess swarm_00"]);
    controller.onKey("ArrowUp");
    expect(sent).toEqual([
      "vset /session/possess swarm_00",
      "vset /robot/swarm_00/move forward",
    ]);
    expect(controller.state.commandLog).toHaveLength(2);
  });

  it("keys without possession only set a hint", () => {
    const sent: string[] = [];
    const controller = connected(sent);
    controller.onTick(swarmTick(100));
    controller.onKey("ArrowUp");
    expect(sent).toHaveLength(0);
    expect(controller.hint).toMatch(/possess/);
  });

  it("commands are disabled while disconnected", () => {
    const sent: string[] = [];
    const controller = connected(sent);
    controller.onTick(swarmTick(100));
    controller.clickMap(24.5, 40.5);
    controller.onSocket("disconnected");
    controller.onKey("ArrowUp");
    controller.onSlider("sg1_feed_valve", 1);
    expect(sent).toEqual(["vset /session/possess swarm_00"]);
    expect(controller.state.possessed).toBeNull();
  });
});

describe("flood drill through the UI", () => {
  it("slider writes, level climbs, valve closes, trend reverses", () => {
    const sent: string[] = [];
    const nowRef = { t: 1000 };
    const controller = connected(sent, nowRef);

    // Operator forces the feed valve open.
    controller.onTick(swarmTick(100, 1, { sg1_level_m: 12.0 }));
    controller.onSlider("sg1_feed_valve", 1);
    expect(sent).toContain("vset /plant/sg1_feed_valve 1");

    // Level climbs at the flooding rate (~0.0169 m/s).
    const rising: Array<[number, number]> = [];
    for (let k = 0; k < 10; k++) {
      const t = 200 + k * 100;
      const level = 12.0 + 0.0169 * (t / 1000);
      controller.onTick(swarmTick(t, 1, { sg1_level_m: level }));
      rising.push([t, level]);
    }
    expect(trendSign(rising)).toBe(1);

    // Close the valve; the level derivative flips negative.
    controller.onSlider("sg1_feed_valve", 0.4);
    expect(sent).toContain("vset /plant/sg1_feed_valve 0.4");
    const falling: Array<[number, number]> = [];
    for (let k = 0; k < 10; k++) {
      const t = 1300 + k * 100;
      const level = 12.02 - 0.0338 * ((t - 1300) / 1000);
      controller.onTick(swarmTick(t, 1, { sg1_level_m: level }));
      falling.push([t, level]);
    }
    expect(trendSign(falling)).toBe(-1);

    // Every gesture produced exactly one auditable command.
    expect(controller.state.commandLog.map((e) => e.cmd)).toEqual(sent);
  });
});

describe("view mode", () => {
  it("thermal toggle changes the requested mode string", () => {
    const sent: string[] = [];
    const controller = connected(sent);
    controller.requestTopdown();
    controller.toggleThermal();
    controller.requestTopdown();
    expect(sent).toEqual(["vget /topdown lit", "vget /topdown thermal"]);
  });
});
