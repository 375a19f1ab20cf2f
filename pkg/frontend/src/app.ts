/**
 * Canvas application: upload an image, scribble foreground (red) and
 * background (green), run segmentation, inspect the mask overlay, refine.
 */

import { ApiError, SegmentationApi, StrokePayload } from "./api.js";
import {
  FOREGROUND_TINT,
  MaskOverlay,
  compositeMask,
} from "./overlay.js";
import {
  STROKE_COLORS,
  UiState,
  beginStroke,
  canSegment,
  clearStrokes,
  extendStroke,
  initialState,
  markCommitted,
  queueStroke,
  setOpacity,
  setSession,
  setTool,
} from "./state.js";

const MAX_UPLOAD_BYTES = 8 * 1024 * 1024;

const api = new SegmentationApi("");
let state: UiState = initialState();
const overlay = new MaskOverlay();

let baseImage: HTMLImageElement | null = null;
let maskGray: Uint8Array | null = null;
let activeStroke: StrokePayload | null = null;

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const fileInput = document.getElementById("file") as HTMLInputElement;
const segmentButton = document.getElementById("segment") as HTMLButtonElement;
const clearButton = document.getElementById("clear") as HTMLButtonElement;
const retryButton = document.getElementById("retry") as HTMLButtonElement;
const opacitySlider = document.getElementById("opacity") as HTMLInputElement;
const radiusSlider = document.getElementById("radius") as HTMLInputElement;
const statsBox = document.getElementById("stats")!;
const noticeBox = document.getElementById("notice")!;
const diagnosticsBox = document.getElementById("diagnostics")!;

function notify(text: string, kind: "info" | "error" = "info"): void {
  noticeBox.textContent = text;
  noticeBox.className = `notice ${kind}`;
}

function showDiagnostics(text: string): void {
  diagnosticsBox.textContent = text;
  diagnosticsBox.style.display = text ? "block" : "none";
}

function refreshControls(): void {
  segmentButton.disabled = !canSegment(state);
  retryButton.style.display = state.pendingStrokes.length > 0 ? "inline-block" : "none";
  if (state.lastStats) {
    const s = state.lastStats;
    statsBox.textContent =
      `trained on ${s.n_train} pixels, ${s.iterations} iterations` +
      `${s.converged ? "" : " (iteration cap)"}, ${s.fit_ms.toFixed(0)} ms`;
  }
  for (const tool of ["fg", "bg", "eraser"] as const) {
    document.getElementById(`tool-${tool}`)!.classList.toggle("active", state.tool === tool);
  }
}

function redraw(): void {
  if (!baseImage) return;
  ctx.drawImage(baseImage, 0, 0);
  if (maskGray && state.overlayOpacity > 0) {
    const frame = ctx.getImageData(0, 0, canvas.width, canvas.height);
    const blended = compositeMask(
      new Uint8ClampedArray(frame.data),
      maskGray,
      FOREGROUND_TINT,
      state.overlayOpacity,
    );
    frame.data.set(blended);
    ctx.putImageData(frame, 0, 0);
  }
  const strokes = [...state.committedStrokes, ...state.pendingStrokes];
  if (activeStroke) strokes.push(activeStroke);
  for (const stroke of strokes) {
    drawStroke(stroke);
  }
}

function drawStroke(stroke: StrokePayload): void {
  if (stroke.points.length === 0) return;
  ctx.strokeStyle = STROKE_COLORS[stroke.label];
  ctx.fillStyle = STROKE_COLORS[stroke.label];
  ctx.lineWidth = 2 * (stroke.radius ?? 1) + 1;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.beginPath();
  const [x0, y0] = stroke.points[0];
  if (stroke.points.length === 1) {
    ctx.arc(x0, y0, (stroke.radius ?? 1) + 0.5, 0, 2 * Math.PI);
    ctx.fill();
    return;
  }
  ctx.moveTo(x0, y0);
  for (const [x, y] of stroke.points.slice(1)) ctx.lineTo(x, y);
  ctx.stroke();
}

async function decodeMask(bytes: Uint8Array): Promise<Uint8Array> {
  const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "image/png" });
  const url = URL.createObjectURL(blob);
  try {
    const image = new Image();
    await new Promise<void>((resolve, reject) => {
      image.onload = () => resolve();
      image.onerror = () => reject(new Error("mask decode failed"));
      image.src = url;
    });
    const scratch = document.createElement("canvas");
    scratch.width = image.width;
    scratch.height = image.height;
    const sctx = scratch.getContext("2d")!;
    sctx.drawImage(image, 0, 0);
    const data = sctx.getImageData(0, 0, image.width, image.height).data;
    const gray = new Uint8Array(image.width * image.height);
    for (let p = 0; p < gray.length; p++) gray[p] = data[p * 4];
    return gray;
  } finally {
    URL.revokeObjectURL(url);
  }
}

async function handleUpload(file: File): Promise<void> {
  if (file.size > MAX_UPLOAD_BYTES) {
    notify(`file is ${(file.size / 1e6).toFixed(1)} MB; keep uploads under 8 MB`, "error");
    return;
  }
  try {
    const info = await api.createSession(file, file.name);
    state = setSession(state, info.session_id, info.width, info.height);
    overlay.clear();
    maskGray = null;
    canvas.width = info.width;
    canvas.height = info.height;
    baseImage = new Image();
    await new Promise<void>((resolve, reject) => {
      baseImage!.onload = () => resolve();
      baseImage!.onerror = () => reject(new Error("could not render image"));
      baseImage!.src = URL.createObjectURL(file);
    });
    notify(`session ${info.session_id.slice(0, 8)}… (${info.width}x${info.height})`);
    showDiagnostics("");
    redraw();
  } catch (err) {
    notify(err instanceof ApiError ? err.message : String(err), "error");
  }
  refreshControls();
}

async function commitPending(): Promise<void> {
  const sessionId = state.sessionId;
  if (!sessionId || state.pendingStrokes.length === 0) return;
  const batch = state.pendingStrokes.length;
  try {
    await api.addStrokes(sessionId, state.pendingStrokes);
    state = markCommitted(state, batch);
    notify("strokes saved");
  } catch (err) {
    // strokes stay pending and visible; the retry button reposts them
    notify(
      err instanceof ApiError ? err.message : "network failure; strokes kept locally",
      "error",
    );
  }
  refreshControls();
}

async function runSegment(): Promise<void> {
  const sessionId = state.sessionId;
  if (!sessionId || !canSegment(state)) return;
  state = { ...state, segmentInFlight: true };
  refreshControls();
  try {
    const result = await api.segment(sessionId);
    const bytes = await api.fetchMask(sessionId);
    overlay.setMask(bytes);
    maskGray = await decodeMask(bytes);
    state = { ...state, lastStats: result.stats };
    notify(`segmented (version ${result.version})`);
    showDiagnostics("");
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      notify("scribble both foreground and background first", "error");
    } else if (err instanceof ApiError && err.status === 500) {
      notify("solver failure", "error");
      showDiagnostics(err.message);
    } else {
      notify(String(err), "error");
    }
  } finally {
    state = { ...state, segmentInFlight: false };
  }
  redraw();
  refreshControls();
}

async function eraseAll(): Promise<void> {
  if (!state.sessionId) return;
  try {
    await api.clearStrokes(state.sessionId);
    state = clearStrokes(state);
    overlay.clear();
    maskGray = null;
    notify("strokes cleared");
    redraw();
  } catch (err) {
    notify(err instanceof ApiError ? err.message : String(err), "error");
  }
  refreshControls();
}

function canvasPoint(event: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [
    ((event.clientX - rect.left) / rect.width) * canvas.width,
    ((event.clientY - rect.top) / rect.height) * canvas.height,
  ];
}

canvas.addEventListener("pointerdown", (event) => {
  if (!state.sessionId || state.tool === "eraser") return;
  canvas.setPointerCapture(event.pointerId);
  activeStroke = beginStroke(state, state.tool);
  const [x, y] = canvasPoint(event);
  extendStroke(activeStroke, x, y, canvas.width, canvas.height);
  redraw();
});

canvas.addEventListener("pointermove", (event) => {
  if (!activeStroke) return;
  const [x, y] = canvasPoint(event);
  extendStroke(activeStroke, x, y, canvas.width, canvas.height);
  redraw();
});

canvas.addEventListener("pointerup", () => {
  if (!activeStroke) return;
  state = queueStroke(state, activeStroke);
  activeStroke = null;
  refreshControls();
  void commitPending();
});

fileInput.addEventListener("change", () => {
  const file = fileInput.files?.[0];
  if (file) void handleUpload(file);
});
segmentButton.addEventListener("click", () => void runSegment());
clearButton.addEventListener("click", () => void eraseAll());
retryButton.addEventListener("click", () => void commitPending());
opacitySlider.addEventListener("input", () => {
  state = setOpacity(state, Number(opacitySlider.value) / 100);
  redraw();
});
radiusSlider.addEventListener("input", () => {
  state = { ...state, brushRadius: Number(radiusSlider.value) };
});
for (const tool of ["fg", "bg", "eraser"] as const) {
  document.getElementById(`tool-${tool}`)!.addEventListener("click", () => {
    state = setTool(state, tool);
    if (tool === "eraser") void eraseAll();
    refreshControls();
  });
}

refreshControls();
notify("upload a PNG or JPEG to start");
