// Keyboard teleoperation: one keypress maps to exactly one bridge
// command, or to a hint when nothing is possessed.

import {
  altitudeCommand,
  moveCommand,
  rotateCommand,
} from "./protocol.js";

export interface TeleopResult {
  cmd: string | null;
  gesture: string | null;
  hint: string | null;
}

const NOOP: TeleopResult = { cmd: null, gesture: null, hint: null };

export function keyToCommand(
  key: string,
  possessed: string | null,
  kind: string | null = null,
): TeleopResult {
  let build: ((id: string) => string) | null = null;
  let gesture: string | null = null;
  switch (key) {
    case "ArrowUp":
      build = (id) => moveCommand(id, "forward");
      gesture = "key:ArrowUp";
      break;
    case "ArrowDown":
      build = (id) => moveCommand(id, "backward");
      gesture = "key:ArrowDown";
      break;
    case "ArrowLeft":
      build = (id) => rotateCommand(id, "left");
      gesture = "key:ArrowLeft";
      break;
    case "ArrowRight":
      build = (id) => rotateCommand(id, "right");
      gesture = "key:ArrowRight";
      break;
    case "PageUp":
    case "PageDown": {
      gesture = `key:${key}`;
      if (possessed === null) {
        return { cmd: null, gesture, hint: "possess a robot first (click its marker)" };
      }
      if (kind !== "aerial") {
        return { cmd: null, gesture, hint: "altitude is for aerial robots" };
      }
      return {
        cmd: altitudeCommand(possessed, key === "PageUp" ? "up" : "down"),
        gesture,
        hint: null,
      };
    }
    default:
      return NOOP;
  }
  if (possessed === null) {
    return { cmd: null, gesture, hint: "possess a robot first (click its marker)" };
  }
  return { cmd: build(possessed), gesture, hint: null };
}
