// Telemetry rendering: top-down trail map, altitude strip, annotated blit.
//
// All judgment shown here comes straight from the server reports; the
// only pixel work on the client is RGB -> RGBA expansion for display.

import { Command, FrameReport } from "./report.js";
import { WireFrame } from "./wire.js";

export type Glyph = "arrow" | "cross" | "circle";

// Same legend the server draws onto the annotated frames.
export function commandGlyph(command: Command | null): Glyph | null {
  if (!command || command.kind === "none") return null;
  if (command.kind === "planar") return "arrow";
  return command.vec[2] < 0 ? "cross" : "circle";
}

export interface ViewTransform {
  toCanvas(x: number, y: number): [number, number];
  scale: number;
}

// Uniform-scale fit of world XY points into a w x h canvas, north up.
export function fitTopDown(
  points: ReadonlyArray<readonly [number, number, number]>,
  w: number,
  h: number,
  margin = 20,
): ViewTransform {
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p[0]);
    maxX = Math.max(maxX, p[0]);
    minY = Math.min(minY, p[1]);
    maxY = Math.max(maxY, p[1]);
  }
  if (!points.length) {
    minX = maxX = 0;
    minY = maxY = 0;
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const scale = Math.min((w - 2 * margin) / spanX, (h - 2 * margin) / spanY, 200);
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  return {
    scale,
    toCanvas(x: number, y: number): [number, number] {
      // +y world (north) points up the screen
      return [w / 2 + (x - cx) * scale, h / 2 - (y - cy) * scale];
    },
  };
}

// RGB wire pixels to the RGBA layout ImageData wants.
export function rgbToRgba(
  pixels: Uint8Array,
  width: number,
  height: number,
): Uint8ClampedArray<ArrayBuffer> {
  const n = width * height;
  if (pixels.length !== n * 3) {
    throw new Error(`pixel buffer is ${pixels.length} bytes, expected ${n * 3}`);
  }
  const out = new Uint8ClampedArray(n * 4);
  for (let i = 0; i < n; i++) {
    out[i * 4] = pixels[i * 3]!;
    out[i * 4 + 1] = pixels[i * 3 + 1]!;
    out[i * 4 + 2] = pixels[i * 3 + 2]!;
    out[i * 4 + 3] = 255;
  }
  return out;
}

export function blitAnnotated(ctx: CanvasRenderingContext2D, frame: WireFrame): void {
  const rgba = rgbToRgba(frame.pixels, frame.width, frame.height);
  const image = new ImageData(rgba, frame.width, frame.height);
  ctx.canvas.width = frame.width;
  ctx.canvas.height = frame.height;
  ctx.putImageData(image, 0, 0);
}

export function drawTopDown(
  ctx: CanvasRenderingContext2D,
  trail: ReadonlyArray<readonly [number, number, number]>,
  report: FrameReport | null,
): void {
  const { width: w, height: h } = ctx.canvas;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, w, h);
  const tf = fitTopDown(trail, w, h);

  if (trail.length > 1) {
    ctx.strokeStyle = "#3da9fc";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    trail.forEach((p, i) => {
      const [x, y] = tf.toCanvas(p[0], p[1]);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  }

  const last = trail.length ? trail[trail.length - 1]! : null;
  if (last) {
    const [x, y] = tf.toCanvas(last[0], last[1]);
    ctx.fillStyle = "#eef0f2";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, Math.PI * 2);
    ctx.fill();
    if (report) {
      // heading tick from yaw (world +x east, ccw positive)
      const hx = x + 14 * Math.cos(report.drone.yaw);
      const hy = y - 14 * Math.sin(report.drone.yaw);
      ctx.strokeStyle = "#eef0f2";
      ctx.beginPath();
      ctx.moveTo(x, y);
      ctx.lineTo(hx, hy);
      ctx.stroke();
      drawGlyph(ctx, commandGlyph(report.command), x, y - 24);
    }
  }
}

function drawGlyph(
  ctx: CanvasRenderingContext2D,
  glyph: Glyph | null,
  x: number,
  y: number,
): void {
  if (!glyph) return;
  ctx.strokeStyle = "#ff8906";
  ctx.lineWidth = 2;
  const s = 8;
  ctx.beginPath();
  if (glyph === "arrow") {
    ctx.moveTo(x, y + s);
    ctx.lineTo(x, y - s);
    ctx.moveTo(x - s / 2, y - s / 2);
    ctx.lineTo(x, y - s);
    ctx.lineTo(x + s / 2, y - s / 2);
  } else if (glyph === "cross") {
    ctx.moveTo(x - s, y - s);
    ctx.lineTo(x + s, y + s);
    ctx.moveTo(x - s, y + s);
    ctx.lineTo(x + s, y - s);
  } else {
    ctx.arc(x, y, s, 0, Math.PI * 2);
  }
  ctx.stroke();
}

export function drawAltitudeStrip(
  ctx: CanvasRenderingContext2D,
  trail: ReadonlyArray<readonly [number, number, number]>,
): void {
  const { width: w, height: h } = ctx.canvas;
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, w, h);
  if (!trail.length) return;
  let minZ = Infinity, maxZ = -Infinity;
  for (const p of trail) {
    minZ = Math.min(minZ, p[2]);
    maxZ = Math.max(maxZ, p[2]);
  }
  const span = Math.max(maxZ - minZ, 0.5);
  const toY = (z: number) => h - 10 - ((z - (minZ + maxZ) / 2 + span / 2) / span) * (h - 20);
  ctx.strokeStyle = "#7f5af0";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  trail.forEach((p, i) => {
    const x = trail.length > 1 ? (i / (trail.length - 1)) * (w - 20) + 10 : w / 2;
    if (i === 0) ctx.moveTo(x, toY(p[2]));
    else ctx.lineTo(x, toY(p[2]));
  });
  ctx.stroke();
  const z = trail[trail.length - 1]![2];
  ctx.fillStyle = "#eef0f2";
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillText(`z ${z.toFixed(2)} m`, 10, 14);
}
