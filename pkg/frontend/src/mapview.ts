// Map-view geometry: pure functions between world meters and canvas
// pixels, kept out of the DOM so they are testable headless.

import type { ImagePayload, RobotPose } from "./types.js";

export const DEFAULT_PX_PER_M = 8;

export interface Marker {
  id: string;
  cx: number; // canvas px
  cy: number;
  tickX: number; // heading tick pixel
  tickY: number;
  color: string;
}

const MARKER_PALETTE = [
  "#ffd42a",
  "#4287f5",
  "#f05454",
  "#54c878",
  "#c46eff",
  "#ff9640",
  "#40dcdc",
  "#ebebeb",
];

export function markerColor(id: string): string {
  let hash = 0;
  for (let i = 0; i < id.length; i++) {
    hash = (hash * 31 + id.charCodeAt(i)) >>> 0;
  }
  return MARKER_PALETTE[hash % MARKER_PALETTE.length];
}

export function markerFor(robot: RobotPose, pxPerM: number): Marker {
  const cx = robot.x * pxPerM;
  const cy = robot.y * pxPerM;
  const yawRad = (robot.yaw * Math.PI) / 180;
  return {
    id: robot.id,
    cx,
    cy,
    tickX: cx + Math.cos(yawRad) * pxPerM * 0.9,
    tickY: cy + Math.sin(yawRad) * pxPerM * 0.9,
    color: markerColor(robot.id),
  };
}

export function markersFor(robots: RobotPose[], pxPerM: number): Marker[] {
  return robots.map((r) => markerFor(r, pxPerM));
}

export function nearestRobot(
  robots: RobotPose[],
  xM: number,
  yM: number,
  maxDistM = 1.5,
): RobotPose | null {
  let best: RobotPose | null = null;
  let bestD = maxDistM;
  for (const robot of robots) {
    const d = Math.hypot(robot.x - xM, robot.y - yM);
    if (d <= bestD) {
      best = robot;
      bestD = d;
    }
  }
  return best;
}

function base64ToBytes(b64: string): Uint8Array {
  const bin = atob(b64);
  const out = new Uint8Array(bin.length);
  for (let i = 0; i < bin.length; i++) {
    out[i] = bin.charCodeAt(i);
  }
  return out;
}

export function imageToRGBA(image: ImagePayload): Uint8ClampedArray<ArrayBuffer> {
  const rgb = base64ToBytes(image.b64);
  const expected = 3 * image.w * image.h;
  if (rgb.length !== expected) {
    throw new Error(`image payload holds ${rgb.length} bytes, expected ${expected}`);
  }
  const rgba = new Uint8ClampedArray(new ArrayBuffer(4 * image.w * image.h));
  for (let px = 0; px < image.w * image.h; px++) {
    rgba[4 * px] = rgb[3 * px];
    rgba[4 * px + 1] = rgb[3 * px + 1];
    rgba[4 * px + 2] = rgb[3 * px + 2];
    rgba[4 * px + 3] = 255;
  }
  return rgba;
}
