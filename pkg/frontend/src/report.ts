// Typed view of the per-frame JSON the service sends over /pilot.

export interface Detection {
  kind: "stretched_out" | "front_of_body" | "none";
  vec: [number, number];
}

export interface Command {
  kind: "planar" | "depth" | "none";
  vec: [number, number, number];
  speed_norm: number;
}

export interface DroneDoc {
  pos: [number, number, number];
  yaw: number;
  vel: [number, number, number];
}

export interface FrameReport {
  frame: number;
  t: number;
  status: "awaiting_init" | "tracking" | "tracking_lost";
  box: [number, number, number, number] | null;
  detection: Detection;
  command: Command | null;
  drone: DroneDoc;
  ms?: number;
}

export interface ServiceError {
  error: string;
}

export type PilotMessage =
  | { kind: "report"; report: FrameReport }
  | { kind: "error"; error: string };

export function parsePilotMessage(text: string): PilotMessage {
  const doc = JSON.parse(text);
  if (typeof doc.error === "string") {
    return { kind: "error", error: doc.error };
  }
  if (typeof doc.frame !== "number" || typeof doc.t !== "number" || !doc.drone) {
    throw new Error(`not a frame report: ${text.slice(0, 80)}`);
  }
  return { kind: "report", report: doc as FrameReport };
}
