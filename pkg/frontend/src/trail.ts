// Ring buffer of recent drone positions for the map views.

export const TRAIL_CAPACITY = 300;

export class DroneTrail {
  private points: [number, number, number][] = [];

  constructor(private readonly capacity = TRAIL_CAPACITY) {}

  push(pos: [number, number, number]): void {
    this.points.push([pos[0], pos[1], pos[2]]);
    if (this.points.length > this.capacity) {
      this.points.shift();
    }
  }

  clear(): void {
    this.points = [];
  }

  get length(): number {
    return this.points.length;
  }

  // oldest first
  all(): ReadonlyArray<readonly [number, number, number]> {
    return this.points;
  }

  latest(): readonly [number, number, number] | null {
    return this.points.length ? this.points[this.points.length - 1]! : null;
  }
}
