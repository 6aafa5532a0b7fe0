// Live connection to the /pilot WebSocket.
//
// The service answers every processed frame with a JSON report text
// message immediately followed by the annotated frame as binary. This
// class re-pairs the two halves, keeps the drone trail, and exposes the
// newest pair through a latest-wins slot so rendering never queues up
// behind a fast stream.

import { parsePilotMessage, FrameReport } from "./report.js";
import { FpsThrottle } from "./throttle.js";
import { DroneTrail } from "./trail.js";
import { WireFrame, encodeWireFrame, decodeWireFrame } from "./wire.js";

export type SessionStatus = "connecting" | "live" | "reconnecting" | "closed";

export interface FramePair {
  report: FrameReport;
  annotated: WireFrame;
}

// The subset of the standard WebSocket surface the session touches;
// tests substitute a scripted double.
export interface SocketLike {
  binaryType: string;
  readyState: number;
  send(data: string | ArrayBuffer): void;
  close(code?: number): void;
  onopen: ((ev?: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onerror: ((ev?: any) => void) | null;
}

export interface SessionOptions {
  fpsCap?: number; // default 15
  reconnectDelayMs?: number; // default 1000
  onStatus?: (status: SessionStatus, note?: string) => void;
  onPair?: (pair: FramePair) => void;
  onServiceError?: (message: string) => void;
  // injectable for tests
  schedule?: (fn: () => void, delayMs: number) => void;
}

const OPEN = 1;

export class PilotSession {
  readonly trail = new DroneTrail();
  status: SessionStatus = "connecting";
  sentFrames = 0;
  pairedFrames = 0;

  private socket: SocketLike | null = null;
  private readonly throttle: FpsThrottle;
  private pendingReport: FrameReport | null = null;
  private latest: FramePair | null = null;
  private closedByUser = false;
  private readonly opts: Required<Pick<SessionOptions, "reconnectDelayMs">> &
    SessionOptions;

  constructor(
    private readonly connect: () => SocketLike,
    options: SessionOptions = {},
  ) {
    this.opts = { reconnectDelayMs: 1000, ...options };
    this.throttle = new FpsThrottle(options.fpsCap ?? 15);
    this.open();
  }

  private open(): void {
    const sock = this.connect();
    sock.binaryType = "arraybuffer";
    this.socket = sock;
    this.pendingReport = null;
    sock.onopen = () => this.setStatus("live");
    sock.onmessage = (ev) => this.handleMessage(ev.data);
    sock.onerror = () => {
      /* the close handler decides what happens next */
    };
    sock.onclose = () => {
      this.socket = null;
      if (this.closedByUser) {
        this.setStatus("closed");
        return;
      }
      // the server starts a fresh session on reconnect; the local trail
      // survives so the operator keeps their history
      this.setStatus("reconnecting", "connection lost, session will restart");
      this.throttle.reset();
      const schedule = this.opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
      schedule(() => {
        if (!this.closedByUser) this.open();
      }, this.opts.reconnectDelayMs);
    };
  }

  private setStatus(status: SessionStatus, note?: string): void {
    this.status = status;
    this.opts.onStatus?.(status, note);
  }

  private handleMessage(data: unknown): void {
    if (typeof data === "string") {
      const msg = parsePilotMessage(data);
      if (msg.kind === "error") {
        this.opts.onServiceError?.(msg.error);
        return;
      }
      this.pendingReport = msg.report;
      return;
    }
    if (!(data instanceof ArrayBuffer)) return;
    const annotated = decodeWireFrame(data);
    const report = this.pendingReport;
    this.pendingReport = null;
    if (!report || report.t !== annotated.timestampMs) {
      // never display a mismatched pair
      this.opts.onServiceError?.("unpaired annotated frame dropped");
      return;
    }
    this.trail.push(report.drone.pos);
    const pair = { report, annotated };
    this.latest = pair;
    this.pairedFrames += 1;
    this.opts.onPair?.(pair);
  }

  // Encode and send one camera frame, subject to the fps cap.
  // Returns true when the frame actually went out.
  sendFrame(frame: WireFrame, nowMs: number): boolean {
    const sock = this.socket;
    if (!sock || sock.readyState !== OPEN || this.status !== "live") return false;
    if (!this.throttle.allow(nowMs)) return false;
    sock.send(encodeWireFrame(frame));
    this.sentFrames += 1;
    return true;
  }

  // Newest report+annotated pair, consumed once; null when nothing new.
  takeLatest(): FramePair | null {
    const pair = this.latest;
    this.latest = null;
    return pair;
  }

  clearTrail(): void {
    this.trail.clear();
  }

  close(): void {
    this.closedByUser = true;
    this.socket?.close();
    if (!this.socket) this.setStatus("closed");
  }
}
