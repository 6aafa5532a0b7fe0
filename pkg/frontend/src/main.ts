// Page wiring for the pilot console.

import { FrameGrabber, openWebcam } from "./capture.js";
import { postInitBox, postReset } from "./control.js";
import { FrameReport } from "./report.js";
import { PilotSession } from "./session.js";
import { blitAnnotated, drawAltitudeStrip, drawTopDown } from "./views.js";

const $ = (id: string) => document.getElementById(id)!;

const video = $("camera") as HTMLVideoElement;
const annotatedCanvas = $("annotated") as HTMLCanvasElement;
const topdownCanvas = $("topdown") as HTMLCanvasElement;
const altitudeCanvas = $("altitude") as HTMLCanvasElement;
const statusEl = $("status");
const errorEl = $("error");
const reportEl = $("report");

const annotatedCtx = annotatedCanvas.getContext("2d")!;
const topdownCtx = topdownCanvas.getContext("2d")!;
const altitudeCtx = altitudeCanvas.getContext("2d")!;

const host = location.hostname || "127.0.0.1";
const port = (document.querySelector("#port") as HTMLInputElement)?.value || "8000";
const httpBase = `http://${host}:${port}`;
const wsUrl = `ws://${host}:${port}/pilot`;

let session: PilotSession | null = null;
let latestReport: FrameReport | null = null;
let streamingPaused = false;

function showError(message: string | null) {
  errorEl.textContent = message ?? "";
  errorEl.style.display = message ? "block" : "none";
}

function describe(report: FrameReport): string {
  const det = report.detection;
  const cmd = report.command;
  return [
    `frame ${report.frame}  t ${report.t} ms  ${report.status}`,
    `detection: ${det.kind}${det.kind !== "none" ? ` vec (${det.vec[0]}, ${det.vec[1]})` : ""}`,
    cmd
      ? `command: ${cmd.kind} vec (${cmd.vec.join(", ")}) speed ${cmd.speed_norm.toFixed(2)}`
      : "command: (none this frame)",
    `drone: pos (${report.drone.pos.map((v) => v.toFixed(2)).join(", ")}) yaw ${report.drone.yaw.toFixed(2)}`,
  ].join("\n");
}

async function start() {
  try {
    await openWebcam(video);
  } catch (err) {
    showError(`camera access denied or unavailable: ${err}`);
    return;
  }
  showError(null);

  const grabber = new FrameGrabber();
  session = new PilotSession(() => new WebSocket(wsUrl), {
    fpsCap: 15,
    onStatus: (status, note) => {
      statusEl.textContent = note ? `${status} (${note})` : status;
      statusEl.className = status;
    },
    onServiceError: (message) => showError(message),
  });

  // capture attempts run faster than the cap; the throttle drops extras
  setInterval(() => {
    if (!session || streamingPaused) return;
    const frame = grabber.grab(video, performance.now());
    if (frame) session.sendFrame(frame, performance.now());
  }, 1000 / 30);

  const render = () => {
    const pair = session?.takeLatest();
    if (pair) {
      latestReport = pair.report;
      blitAnnotated(annotatedCtx, pair.annotated);
      reportEl.textContent = describe(pair.report);
    }
    if (session) {
      drawTopDown(topdownCtx, session.trail.all(), latestReport);
      drawAltitudeStrip(altitudeCtx, session.trail.all());
    }
    requestAnimationFrame(render);
  };
  requestAnimationFrame(render);
}

// drag a box on the (frozen) annotated view to hand-init the tracker
let dragStart: [number, number] | null = null;

function canvasPoint(ev: MouseEvent): [number, number] {
  const rect = annotatedCanvas.getBoundingClientRect();
  const sx = annotatedCanvas.width / rect.width;
  const sy = annotatedCanvas.height / rect.height;
  return [(ev.clientX - rect.left) * sx, (ev.clientY - rect.top) * sy];
}

annotatedCanvas.addEventListener("mousedown", (ev) => {
  streamingPaused = true; // freeze the view while the user drags
  dragStart = canvasPoint(ev);
});

annotatedCanvas.addEventListener("mousemove", (ev) => {
  if (!dragStart) return;
  const [x, y] = canvasPoint(ev);
  annotatedCtx.strokeStyle = "#2cb67d";
  annotatedCtx.lineWidth = 2;
  annotatedCtx.strokeRect(
    Math.min(dragStart[0], x),
    Math.min(dragStart[1], y),
    Math.abs(x - dragStart[0]),
    Math.abs(y - dragStart[1]),
  );
});

annotatedCanvas.addEventListener("mouseup", async (ev) => {
  if (!dragStart) return;
  const [x, y] = canvasPoint(ev);
  const box = {
    x: Math.round(Math.min(dragStart[0], x)),
    y: Math.round(Math.min(dragStart[1], y)),
    w: Math.round(Math.abs(x - dragStart[0])),
    h: Math.round(Math.abs(y - dragStart[1])),
  };
  dragStart = null;
  streamingPaused = false;
  if (box.w < 8 || box.h < 8) return; // a click, not a drag
  const result = await postInitBox(httpBase, box);
  if (!result.ok) showError(result.error ?? "init box rejected");
});

$("connect").addEventListener("click", () => void start());

$("reset").addEventListener("click", async () => {
  await postReset(httpBase);
  session?.clearTrail();
  latestReport = null;
});
