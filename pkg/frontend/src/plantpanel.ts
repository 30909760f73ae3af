// Plant variable panel: which names get sliders, how writes are built,
// and the level-trend detector behind the flood drill.

import { plantSetCommand } from "./protocol.js";

// The writable control inputs (the registry's rw entries besides the
// aux scratch registers, which are not operator-facing).
export const WRITABLE_CONTROLS: ReadonlyArray<string> = [
  "rod_position",
  "turbine_throttle",
  "sg1_feed_valve",
  "sg2_feed_valve",
  "rcp1_speed",
  "rcp2_speed",
  "cw_inlet_c",
];

const CONTROL_RANGES: Record<string, [number, number]> = {
  rod_position: [0, 1],
  turbine_throttle: [0, 1],
  sg1_feed_valve: [0, 1],
  sg2_feed_valve: [0, 1],
  rcp1_speed: [0, 1],
  rcp2_speed: [0, 1],
  cw_inlet_c: [0, 40],
};

export function isWritable(name: string): boolean {
  return WRITABLE_CONTROLS.includes(name);
}

export function controlRange(name: string): [number, number] {
  return CONTROL_RANGES[name] ?? [0, 1];
}

export function sliderCommand(name: string, value: number): string {
  if (!isWritable(name)) {
    throw new Error(`${name} is not operator-writable`);
  }
  return plantSetCommand(name, value);
}

// Variables surfaced in the panel by default (the aux/probe families
// are hidden unless the filter matches them explicitly).
export function selectVariables(plant: Record<string, number>, filter: string): string[] {
  const needle = filter.trim().toLowerCase();
  const names = Object.keys(plant).sort();
  if (needle !== "") {
    return names.filter((n) => n.includes(needle));
  }
  return names.filter((n) => !n.startsWith("aux_") && !n.startsWith("probe_"));
}

export function formatValue(value: number): string {
  const magnitude = Math.abs(value);
  if (magnitude >= 1000) return value.toFixed(1);
  if (magnitude >= 1) return value.toFixed(3);
  return value.toFixed(4);
}

// -- trend detection ----------------------------------------------------

export type TrendSign = -1 | 0 | 1;

/**
 * Least-squares slope sign over (t_ms, value) samples with a deadband.
 * The flood drill watches sg1_level_m: the sign flips from +1 while the
 * feed valve is stuck open to -1 once the operator closes it.
 */
export function trendSign(
  series: ReadonlyArray<readonly [number, number]>,
  deadbandPerS = 1e-4,
): TrendSign {
  if (series.length < 2) return 0;
  const n = series.length;
  let sumT = 0;
  let sumV = 0;
  for (const [t, v] of series) {
    sumT += t / 1000;
    sumV += v;
  }
  const meanT = sumT / n;
  const meanV = sumV / n;
  let num = 0;
  let den = 0;
  for (const [t, v] of series) {
    const dt = t / 1000 - meanT;
    num += dt * (v - meanV);
    den += dt * dt;
  }
  if (den === 0) return 0;
  const slope = num / den;
  if (slope > deadbandPerS) return 1;
  if (slope < -deadbandPerS) return -1;
  return 0;
}

/** Rolling (t_ms, value) window used by the panel's trend indicators. */
export class TrendWindow {
  private samples: Array<[number, number]> = [];

  constructor(private readonly capacity = 30) {}

  push(tMs: number, value: number): void {
    const last = this.samples[this.samples.length - 1];
    if (last !== undefined && tMs <= last[0]) return;
    this.samples.push([tMs, value]);
    if (this.samples.length > this.capacity) {
      this.samples.shift();
    }
  }

  clear(): void {
    this.samples = [];
  }

  sign(deadbandPerS = 1e-4): TrendSign {
    return trendSign(this.samples, deadbandPerS);
  }

  get size(): number {
    return this.samples.length;
  }
}
