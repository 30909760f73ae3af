export interface RobotPose {
  id: string;
  kind: string;
  x: number;
  y: number;
  z: number;
  yaw: number;
}

export interface TickEvent {
  event: "tick";
  t_ms: number;
  robots: RobotPose[];
  plant: Record<string, number>;
}

export interface ImagePayload {
  w: number;
  h: number;
  b64: string;
}

export interface GatewayResponse {
  id: number | null;
  status: "ok" | "error";
  body: string;
  image?: ImagePayload;
}

export type SocketStatus = "connecting" | "connected" | "disconnected";

export type ViewMode = "lit" | "thermal";

export interface CommandLogEntry {
  gesture: string;
  cmd: string;
  wallMs: number;
}
