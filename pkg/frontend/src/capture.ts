// Webcam capture: grab frames off a video element, downscale to the
// stream size, and hand back raw RGB for the wire encoder.

import { WireFrame } from "./wire.js";

export interface CaptureSize {
  width: number;
  height: number;
}

export const DEFAULT_SIZE: CaptureSize = { width: 640, height: 480 };

export async function openWebcam(video: HTMLVideoElement): Promise<MediaStream> {
  const stream = await navigator.mediaDevices.getUserMedia({
    video: { width: { ideal: 1280 }, height: { ideal: 720 } },
    audio: false,
  });
  video.srcObject = stream;
  await video.play();
  return stream;
}

export class FrameGrabber {
  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;

  constructor(private readonly size: CaptureSize = DEFAULT_SIZE) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = size.width;
    this.canvas.height = size.height;
    const ctx = this.canvas.getContext("2d", { willReadFrequently: true });
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  // null until the video has real data
  grab(video: HTMLVideoElement, timestampMs: number): WireFrame | null {
    if (video.readyState < 2 || !video.videoWidth) return null;
    const { width, height } = this.size;
    this.ctx.drawImage(video, 0, 0, width, height);
    const rgba = this.ctx.getImageData(0, 0, width, height).data;
    const pixels = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      pixels[i * 3] = rgba[i * 4]!;
      pixels[i * 3 + 1] = rgba[i * 4 + 1]!;
      pixels[i * 3 + 2] = rgba[i * 4 + 2]!;
    }
    return { width, height, timestampMs: Math.round(timestampMs), pixels };
  }
}
