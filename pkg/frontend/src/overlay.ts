/**
 * Mask overlay coloring. Server masks are 8-bit grayscale PNGs whose pixel
 * value is the object label; browsers decode those to RGBA with the label in
 * every color channel, so the red channel is the label plane.
 */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

/** Fixed per-label colors (label 1 = first entry); background stays clear. */
export const LABEL_COLORS: Rgb[] = [
  { r: 255, g: 99, b: 71 },
  { r: 65, g: 105, b: 225 },
  { r: 60, g: 179, b: 113 },
  { r: 238, g: 130, b: 238 },
  { r: 255, g: 165, b: 0 },
  { r: 64, g: 224, b: 208 },
  { r: 218, g: 165, b: 32 },
  { r: 176, g: 196, b: 222 },
];

export function colorForLabel(label: number): Rgb {
  return LABEL_COLORS[(label - 1) % LABEL_COLORS.length];
}

/** Extract the label plane from decoded RGBA pixels (red channel). */
export function labelsFromRgba(rgba: Uint8ClampedArray): Uint8Array {
  const labels = new Uint8Array(rgba.length / 4);
  for (let i = 0; i < labels.length; i++) {
    labels[i] = rgba[i * 4];
  }
  return labels;
}

/**
 * Colorize a label plane into premade RGBA overlay pixels. Background label
 * 0 is fully transparent; every other label gets its fixed color at `alpha`.
 */
export function colorizeLabels(labels: Uint8Array, alpha: number): Uint8ClampedArray {
  const a = Math.round(Math.max(0, Math.min(1, alpha)) * 255);
  const out = new Uint8ClampedArray(labels.length * 4);
  for (let i = 0; i < labels.length; i++) {
    const label = labels[i];
    if (label === 0) continue;
    const color = colorForLabel(label);
    out[i * 4] = color.r;
    out[i * 4 + 1] = color.g;
    out[i * 4 + 2] = color.b;
    out[i * 4 + 3] = a;
  }
  return out;
}

export function countLabel(labels: Uint8Array, label: number): number {
  let n = 0;
  for (let i = 0; i < labels.length; i++) if (labels[i] === label) n++;
  return n;
}
