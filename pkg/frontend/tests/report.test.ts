import { describe, expect, it } from "vitest";

import { parsePilotMessage } from "../src/report.js";

const SAMPLE =
  '{"frame":17,"t":680,"status":"tracking","box":[271,120,134,336],' +
  '"detection":{"kind":"stretched_out","vec":[96,-41]},' +
  '"command":{"kind":"planar","vec":[96.0,-41.0,0.0],"speed_norm":0.78},' +
  '"drone":{"pos":[0.0,0.412,1.2],"yaw":1.570796,"vel":[0.0,0.2,0.0]}}';

describe("pilot message parsing", () => {
  it("reads a frame report", () => {
    const msg = parsePilotMessage(SAMPLE);
    expect(msg.kind).toBe("report");
    if (msg.kind !== "report") return;
    expect(msg.report.frame).toBe(17);
    expect(msg.report.t).toBe(680);
    expect(msg.report.box).toEqual([271, 120, 134, 336]);
    expect(msg.report.detection.kind).toBe("stretched_out");
    expect(msg.report.command?.speed_norm).toBe(0.78);
    expect(msg.report.drone.pos[2]).toBe(1.2);
  });

  it("reads a null command and null box", () => {
    const text = SAMPLE.replace(/"box":\[[^\]]*\]/, '"box":null').replace(
      /"command":\{[^}]*\}/,
      '"command":null',
    );
    const msg = parsePilotMessage(text);
    if (msg.kind !== "report") throw new Error("expected report");
    expect(msg.report.box).toBeNull();
    expect(msg.report.command).toBeNull();
  });

  it("classifies service errors", () => {
    const msg = parsePilotMessage('{"error":"expected a binary wire frame"}');
    expect(msg).toEqual({ kind: "error", error: "expected a binary wire frame" });
  });

  it("rejects unrecognized payloads", () => {
    expect(() => parsePilotMessage('{"hello":1}')).toThrow(/not a frame report/);
  });
});
