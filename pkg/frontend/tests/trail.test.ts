import { describe, expect, it } from "vitest";

import { DroneTrail, TRAIL_CAPACITY } from "../src/trail.js";

describe("drone trail", () => {
  it("keeps points in arrival order", () => {
    const trail = new DroneTrail();
    trail.push([0, 0, 1]);
    trail.push([1, 0, 1]);
    trail.push([2, 0, 1]);
    expect(trail.all().map((p) => p[0])).toEqual([0, 1, 2]);
    expect(trail.latest()).toEqual([2, 0, 1]);
  });

  it("drops the oldest beyond 300 points", () => {
    const trail = new DroneTrail();
    for (let i = 0; i < TRAIL_CAPACITY + 40; i++) trail.push([i, 0, 0]);
    expect(trail.length).toBe(TRAIL_CAPACITY);
    expect(trail.all()[0]![0]).toBe(40);
    expect(trail.latest()![0]).toBe(TRAIL_CAPACITY + 39);
  });

  it("clear empties it", () => {
    const trail = new DroneTrail();
    trail.push([1, 2, 3]);
    trail.clear();
    expect(trail.length).toBe(0);
    expect(trail.latest()).toBeNull();
  });

  it("copies pushed positions instead of aliasing them", () => {
    const trail = new DroneTrail();
    const pos: [number, number, number] = [1, 1, 1];
    trail.push(pos);
    pos[0] = 99;
    expect(trail.latest()![0]).toBe(1);
  });
});
