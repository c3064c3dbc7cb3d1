/**
 * Browser entry point: timeline with badges, frame canvas with mask overlay,
 * brush editing, and the propagate / suggest / metrics controls.
 */

import { ApiClient, ApiError, type SessionSummary } from "./api.js";
import { MaskEdit, validateLabel } from "./brush.js";
import { colorizeLabels, colorForLabel, labelsFromRgba } from "./overlay.js";
import { deriveBadges, isStale } from "./state.js";

const api = new ApiClient("");

interface View {
  sessionId: string;
  summary: SessionSummary;
  currentFrame: number;
  overlayAlpha: number;
  /** Exact mask PNG bytes per frame, as served by the API. */
  maskBytes: Map<number, ArrayBuffer>;
  edit: MaskEdit | null;
  brushLabel: number;
  brushRadius: number;
}

let view: View | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const banner = el<HTMLDivElement>("status");
  banner.textContent = text;
  banner.className = isError ? "status error" : "status";
}

async function refreshSummary(): Promise<void> {
  if (!view) return;
  view.summary = await api.getSummary(view.sessionId);
  renderTimeline();
  renderLoopState();
}

async function loadMaskBytes(frame: number): Promise<ArrayBuffer | null> {
  if (!view) return null;
  if (view.maskBytes.has(frame)) return view.maskBytes.get(frame)!;
  try {
    const bytes = await api.fetchMask(view.sessionId, frame);
    view.maskBytes.set(frame, bytes);
    return bytes;
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) return null;
    throw error;
  }
}

async function decodeLabels(bytes: ArrayBuffer): Promise<{ labels: Uint8Array; w: number; h: number }> {
  const bitmap = await createImageBitmap(new Blob([bytes], { type: "image/png" }));
  const canvas = document.createElement("canvas");
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(bitmap, 0, 0);
  const rgba = ctx.getImageData(0, 0, bitmap.width, bitmap.height).data;
  return { labels: labelsFromRgba(rgba), w: bitmap.width, h: bitmap.height };
}

async function renderFrame(): Promise<void> {
  if (!view) return;
  const { sessionId, currentFrame, summary } = view;
  const frameCanvas = el<HTMLCanvasElement>("frame-canvas");
  const overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
  frameCanvas.width = overlayCanvas.width = summary.frame_width;
  frameCanvas.height = overlayCanvas.height = summary.frame_height;

  const frameBitmap = await createImageBitmap(
    new Blob([await api.fetchFrame(sessionId, currentFrame)], { type: "image/png" }),
  );
  frameCanvas.getContext("2d")!.drawImage(frameBitmap, 0, 0);

  const octx = overlayCanvas.getContext("2d")!;
  octx.clearRect(0, 0, overlayCanvas.width, overlayCanvas.height);
  if (view.edit) {
    const rgba = colorizeLabels(new Uint8Array(view.edit.labels), view.overlayAlpha);
    octx.putImageData(new ImageData(new Uint8ClampedArray(rgba), view.edit.width, view.edit.height), 0, 0);
  } else {
    const bytes = await loadMaskBytes(currentFrame);
    if (bytes) {
      const { labels, w, h } = await decodeLabels(bytes);
      const rgba = colorizeLabels(labels, view.overlayAlpha);
      octx.putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
    }
  }
  el<HTMLSpanElement>("frame-label").textContent =
    `frame ${currentFrame} / ${summary.num_frames - 1}`;
}

function renderTimeline(): void {
  if (!view) return;
  const timeline = el<HTMLDivElement>("timeline");
  timeline.replaceChildren();
  const badges = deriveBadges(view.summary);
  for (const badge of badges) {
    const cell = document.createElement("div");
    cell.className = `cell ${badge.kind}` + (badge.frame === view.currentFrame ? " current" : "");
    cell.title = `frame ${badge.frame} (${badge.kind}` +
      (badge.rank !== undefined ? ` #${badge.rank}` : "") + ")";
    const thumb = document.createElement("img");
    thumb.src = api.frameUrl(view.sessionId, badge.frame);
    thumb.alt = `frame ${badge.frame}`;
    cell.appendChild(thumb);
    const tag = document.createElement("span");
    tag.className = "tag";
    tag.textContent =
      badge.kind === "annotated" ? "A" :
      badge.kind === "suggested" ? String(badge.rank) :
      badge.kind === "predicted" ? "·" : "";
    cell.appendChild(tag);
    cell.addEventListener("click", () => void jumpTo(badge.frame));
    timeline.appendChild(cell);
  }
}

function renderLoopState(): void {
  if (!view) return;
  const summary = view.summary;
  el<HTMLSpanElement>("session-label").textContent =
    `${summary.id} — ${summary.num_frames} frames, objects: ${summary.num_objects ?? "unset"}, rev ${summary.revision}`;
  el<HTMLButtonElement>("suggest-btn").disabled = !summary.predictions_fresh;
  if (isStale(summary)) {
    setStatus("annotations changed — run propagation to refresh predictions");
  }
}

async function jumpTo(frame: number): Promise<void> {
  if (!view) return;
  view.currentFrame = frame;
  view.edit = null;
  renderTimeline();
  await renderFrame();
}

function beginEdit(): void {
  if (!view) return;
  const { summary } = view;
  view.edit = new MaskEdit(summary.frame_width, summary.frame_height);
  setStatus(`editing frame ${view.currentFrame}: paint with label ${view.brushLabel}`);
  void renderFrame();
}

async function saveEdit(): Promise<void> {
  if (!view || !view.edit) return;
  const { edit } = view;
  const message = validateLabel(edit.maxLabel(), view.summary.num_objects);
  if (message && view.summary.num_objects !== null) {
    setStatus(message, true);
    return;
  }
  const canvas = document.createElement("canvas");
  canvas.width = edit.width;
  canvas.height = edit.height;
  const ctx = canvas.getContext("2d")!;
  const rgba = new Uint8ClampedArray(edit.labels.length * 4);
  for (let i = 0; i < edit.labels.length; i++) {
    const v = edit.labels[i];
    rgba[i * 4] = rgba[i * 4 + 1] = rgba[i * 4 + 2] = v;
    rgba[i * 4 + 3] = 255;
  }
  ctx.putImageData(new ImageData(rgba, edit.width, edit.height), 0, 0);
  const blob: Blob = await new Promise((resolve, reject) =>
    canvas.toBlob((b) => (b ? resolve(b) : reject(new Error("PNG encode failed"))), "image/png"),
  );
  await api.putAnnotation(view.sessionId, view.currentFrame, blob);
  view.edit = null;
  view.maskBytes.clear();
  await refreshSummary();
  await renderFrame();
  setStatus(`saved annotation for frame ${view.currentFrame}`);
}

async function uploadMaskFile(file: File): Promise<void> {
  if (!view) return;
  await api.putAnnotation(view.sessionId, view.currentFrame, await file.arrayBuffer());
  view.edit = null;
  view.maskBytes.clear();
  await refreshSummary();
  await renderFrame();
  setStatus(`uploaded annotation for frame ${view.currentFrame}`);
}

async function runPropagation(): Promise<void> {
  if (!view) return;
  setStatus("propagating…");
  await api.propagate(view.sessionId);
  await api.waitUntilFresh(view.sessionId);
  view.maskBytes.clear();
  await refreshSummary();
  await renderFrame();
  setStatus("propagation finished");
}

async function runSuggest(): Promise<void> {
  if (!view) return;
  const k = Number(el<HTMLInputElement>("suggest-k").value) || 3;
  const result = await api.suggest(view.sessionId, k);
  await refreshSummary();
  const ranked = result.new_candidates
    .map((frame, i) => `#${i + 1}→${frame}`)
    .join("  ");
  setStatus(`suggested (in importance order): ${ranked}`);
}

async function runMetrics(): Promise<void> {
  if (!view) return;
  const gtDir = el<HTMLInputElement>("gt-dir").value.trim();
  if (!gtDir) {
    setStatus("set a ground-truth directory first", true);
    return;
  }
  const report = await api.metrics(view.sessionId, gtDir);
  el<HTMLSpanElement>("metrics-label").textContent =
    `J=${report.mean_J.toFixed(4)} F=${report.mean_F.toFixed(4)} J&F=${report.J_and_F.toFixed(4)}`;
}

function wireCanvasEvents(): void {
  const overlay = el<HTMLCanvasElement>("overlay-canvas");
  let painting = false;
  let last: { x: number; y: number } | null = null;

  const toMask = (event: MouseEvent) => {
    const rect = overlay.getBoundingClientRect();
    return {
      x: ((event.clientX - rect.left) / rect.width) * overlay.width,
      y: ((event.clientY - rect.top) / rect.height) * overlay.height,
    };
  };

  overlay.addEventListener("mousedown", (event) => {
    if (!view) return;
    if (!view.edit) beginEdit();
    painting = true;
    last = toMask(event);
    view.edit!.paint(last.x, last.y, view.brushRadius, view.brushLabel);
    void renderFrame();
  });
  overlay.addEventListener("mousemove", (event) => {
    if (!painting || !view?.edit || !last) return;
    const point = toMask(event);
    view.edit.stroke(last.x, last.y, point.x, point.y, view.brushRadius, view.brushLabel);
    last = point;
    void renderFrame();
  });
  window.addEventListener("mouseup", () => {
    painting = false;
    last = null;
  });
}

function wireControls(): void {
  el<HTMLButtonElement>("open-btn").addEventListener("click", () => {
    void openSession(el<HTMLInputElement>("frames-dir").value.trim());
  });
  el<HTMLButtonElement>("prev-btn").addEventListener("click", () => {
    if (view) void jumpTo(Math.max(0, view.currentFrame - 1));
  });
  el<HTMLButtonElement>("next-btn").addEventListener("click", () => {
    if (view) void jumpTo(Math.min(view.summary.num_frames - 1, view.currentFrame + 1));
  });
  el<HTMLButtonElement>("propagate-btn").addEventListener("click", () => {
    void guard(runPropagation());
  });
  el<HTMLButtonElement>("suggest-btn").addEventListener("click", () => {
    void guard(runSuggest());
  });
  el<HTMLButtonElement>("metrics-btn").addEventListener("click", () => {
    void guard(runMetrics());
  });
  el<HTMLButtonElement>("edit-btn").addEventListener("click", beginEdit);
  el<HTMLButtonElement>("save-btn").addEventListener("click", () => {
    void guard(saveEdit());
  });
  el<HTMLButtonElement>("clear-btn").addEventListener("click", () => {
    if (view?.edit) {
      view.edit.clear();
      void renderFrame();
    }
  });
  el<HTMLInputElement>("brush-label").addEventListener("change", (event) => {
    if (!view) return;
    const label = Number((event.target as HTMLInputElement).value);
    const message = validateLabel(label, view.summary.num_objects);
    if (message) {
      setStatus(message, true);
      (event.target as HTMLInputElement).value = String(view.brushLabel);
      return;
    }
    view.brushLabel = label;
    const swatch = el<HTMLSpanElement>("brush-swatch");
    if (label > 0) {
      const color = colorForLabel(label);
      swatch.style.background = `rgb(${color.r},${color.g},${color.b})`;
    } else {
      swatch.style.background = "transparent";
    }
  });
  el<HTMLInputElement>("brush-size").addEventListener("input", (event) => {
    if (view) view.brushRadius = Number((event.target as HTMLInputElement).value);
  });
  el<HTMLInputElement>("overlay-alpha").addEventListener("input", (event) => {
    if (view) {
      view.overlayAlpha = Number((event.target as HTMLInputElement).value) / 100;
      void renderFrame();
    }
  });
  el<HTMLInputElement>("mask-file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.files && input.files[0]) void guard(uploadMaskFile(input.files[0]));
    input.value = "";
  });
}

async function guard(work: Promise<void>): Promise<void> {
  try {
    await work;
  } catch (error) {
    if (error instanceof ApiError) {
      setStatus(error.message, true);
    } else {
      setStatus(String(error), true);
      throw error;
    }
  }
}

async function openSession(framesDirOrId: string): Promise<void> {
  if (!framesDirOrId) {
    setStatus("enter a frames directory (server-side path) or session id", true);
    return;
  }
  let sessionId = framesDirOrId;
  if (framesDirOrId.includes("/")) {
    const created = await api.createSession(framesDirOrId);
    sessionId = created.id;
  }
  const summary = await api.getSummary(sessionId);
  view = {
    sessionId,
    summary,
    currentFrame: 0,
    overlayAlpha: 0.45,
    maskBytes: new Map(),
    edit: null,
    brushLabel: 1,
    brushRadius: 8,
  };
  window.location.hash = sessionId;
  el<HTMLDivElement>("workspace").hidden = false;
  renderTimeline();
  renderLoopState();
  await renderFrame();
  setStatus(`opened session ${sessionId}`);
}

window.addEventListener("DOMContentLoaded", () => {
  wireControls();
  wireCanvasEvents();
  const fromHash = window.location.hash.replace(/^#/, "");
  if (fromHash) void guard(openSession(fromHash));
});
