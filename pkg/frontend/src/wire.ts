// Binary frame codec shared with the pilot service.
//
// Layout: "GPF1" magic, then width, height, timestamp_ms as little-endian
// uint32, then width*height*3 bytes of row-major RGB.

export const WIRE_MAGIC = "GPF1";
export const HEADER_BYTES = 16;
export const MAX_WIRE_DIM = 4096;

export interface WireFrame {
  width: number;
  height: number;
  timestampMs: number;
  pixels: Uint8Array; // RGB, length width*height*3
}

export function encodeWireFrame(frame: WireFrame): ArrayBuffer {
  const { width, height, timestampMs, pixels } = frame;
  if (width < 1 || height < 1 || width > MAX_WIRE_DIM || height > MAX_WIRE_DIM) {
    throw new Error(`frame size ${width}x${height} out of range`);
  }
  if (pixels.length !== width * height * 3) {
    throw new Error(`pixel buffer is ${pixels.length} bytes, expected ${width * height * 3}`);
  }
  const buf = new ArrayBuffer(HEADER_BYTES + pixels.length);
  const view = new DataView(buf);
  for (let i = 0; i < 4; i++) view.setUint8(i, WIRE_MAGIC.charCodeAt(i));
  view.setUint32(4, width, true);
  view.setUint32(8, height, true);
  view.setUint32(12, timestampMs >>> 0, true);
  new Uint8Array(buf, HEADER_BYTES).set(pixels);
  return buf;
}

export function decodeWireFrame(data: ArrayBuffer): WireFrame {
  if (data.byteLength < HEADER_BYTES) {
    throw new Error(`message is ${data.byteLength} bytes, shorter than the ${HEADER_BYTES}-byte header`);
  }
  const view = new DataView(data);
  let magic = "";
  for (let i = 0; i < 4; i++) magic += String.fromCharCode(view.getUint8(i));
  if (magic !== WIRE_MAGIC) {
    throw new Error(`bad magic "${magic}"`);
  }
  const width = view.getUint32(4, true);
  const height = view.getUint32(8, true);
  const timestampMs = view.getUint32(12, true);
  if (width < 1 || height < 1 || width > MAX_WIRE_DIM || height > MAX_WIRE_DIM) {
    throw new Error(`frame size ${width}x${height} out of range`);
  }
  const expected = HEADER_BYTES + width * height * 3;
  if (data.byteLength !== expected) {
    throw new Error(`message is ${data.byteLength} bytes, expected ${expected}`);
  }
  return { width, height, timestampMs, pixels: new Uint8Array(data, HEADER_BYTES) };
}
