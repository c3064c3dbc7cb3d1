/**
 * Full-resolution mask editing buffer for the brush tool. Painting happens
 * on a plain label array; PNG encoding for upload lives in the DOM layer.
 */

export class MaskEdit {
  readonly width: number;
  readonly height: number;
  readonly labels: Uint8Array;
  private dirty = false;

  constructor(width: number, height: number, initial?: Uint8Array) {
    if (width < 1 || height < 1) throw new Error("mask must have positive size");
    this.width = width;
    this.height = height;
    this.labels = new Uint8Array(width * height);
    if (initial) {
      if (initial.length !== this.labels.length) {
        throw new Error(
          `initial labels have ${initial.length} pixels, expected ${this.labels.length}`,
        );
      }
      this.labels.set(initial);
    }
  }

  get isDirty(): boolean {
    return this.dirty;
  }

  at(x: number, y: number): number {
    return this.labels[y * this.width + x];
  }

  /** Stamp a filled circle of `label` (0 erases). Clipped to the canvas. */
  paint(cx: number, cy: number, radius: number, label: number): void {
    if (label < 0 || label > 255) throw new Error(`label ${label} out of range`);
    const r = Math.max(0, radius);
    const x0 = Math.max(0, Math.floor(cx - r));
    const x1 = Math.min(this.width - 1, Math.ceil(cx + r));
    const y0 = Math.max(0, Math.floor(cy - r));
    const y1 = Math.min(this.height - 1, Math.ceil(cy + r));
    const r2 = r * r;
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy <= r2) {
          this.labels[y * this.width + x] = label;
          this.dirty = true;
        }
      }
    }
  }

  /** Straight stroke between two points, stamped densely enough to be solid. */
  stroke(x0: number, y0: number, x1: number, y1: number, radius: number, label: number): void {
    const steps = Math.max(1, Math.ceil(Math.hypot(x1 - x0, y1 - y0)));
    for (let i = 0; i <= steps; i++) {
      const t = i / steps;
      this.paint(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, radius, label);
    }
  }

  clear(): void {
    this.labels.fill(0);
    this.dirty = true;
  }

  nonzeroCount(): number {
    let n = 0;
    for (let i = 0; i < this.labels.length; i++) if (this.labels[i] !== 0) n++;
    return n;
  }

  maxLabel(): number {
    let top = 0;
    for (let i = 0; i < this.labels.length; i++) {
      if (this.labels[i] > top) top = this.labels[i];
    }
    return top;
  }
}

/**
 * Client-side guard mirroring the server's label contract: painting a label
 * above the session's object count is blocked before upload.
 */
export function validateLabel(label: number, numObjects: number | null): string | null {
  if (!Number.isInteger(label) || label < 0) return `label ${label} is not a valid id`;
  if (numObjects !== null && label > numObjects) {
    return `label ${label} exceeds the session's object count (${numObjects})`;
  }
  return null;
}
