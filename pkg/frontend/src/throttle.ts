// Send-rate gate: at most `fps` frames per second, extras dropped.

export class FpsThrottle {
  private readonly intervalMs: number;
  private lastMs: number | null = null;

  constructor(fps: number) {
    if (fps <= 0) throw new Error("fps cap must be positive");
    this.intervalMs = 1000 / fps;
  }

  allow(nowMs: number): boolean {
    if (this.lastMs !== null && nowMs - this.lastMs < this.intervalMs) {
      return false;
    }
    this.lastMs = nowMs;
    return true;
  }

  reset(): void {
    this.lastMs = null;
  }
}
