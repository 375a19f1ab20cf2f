/**
 * UI state and the pure transitions on it.
 *
 * Strokes drawn with the fg tool are red and post with label "fg";
 * bg strokes are green. A stroke lives in pendingStrokes until the
 * server acknowledges it, so nothing visible is ever silently dropped.
 */

import type { SegmentStats, StrokeLabel, StrokePayload } from "./api.js";

export type Tool = StrokeLabel | "eraser";

export const STROKE_COLORS: Record<StrokeLabel, string> = {
  fg: "#e53935", // red = foreground
  bg: "#43a047", // green = background
};

export interface UiState {
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  tool: Tool;
  brushRadius: number;
  overlayOpacity: number;
  pendingStrokes: StrokePayload[];
  committedStrokes: StrokePayload[];
  lastStats: SegmentStats | null;
  segmentInFlight: boolean;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    tool: "fg",
    brushRadius: 2,
    overlayOpacity: 0.5,
    pendingStrokes: [],
    committedStrokes: [],
    lastStats: null,
    segmentInFlight: false,
  };
}

export function clampOpacity(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function setOpacity(state: UiState, value: number): UiState {
  return { ...state, overlayOpacity: clampOpacity(value) };
}

export function setTool(state: UiState, tool: Tool): UiState {
  return { ...state, tool };
}

export function setSession(state: UiState, sessionId: string, width: number, height: number): UiState {
  return {
    ...initialState(),
    tool: state.tool,
    brushRadius: state.brushRadius,
    overlayOpacity: state.overlayOpacity,
    sessionId,
    imageWidth: width,
    imageHeight: height,
  };
}

/** Clip a canvas point into image bounds (client-side, before posting). */
export function clipPoint(x: number, y: number, width: number, height: number): [number, number] {
  return [Math.min(width - 1, Math.max(0, x)), Math.min(height - 1, Math.max(0, y))];
}

export function beginStroke(state: UiState, label: StrokeLabel): StrokePayload {
  return { points: [], label, radius: state.brushRadius };
}

export function extendStroke(
  stroke: StrokePayload,
  x: number,
  y: number,
  width: number,
  height: number,
): void {
  stroke.points.push(clipPoint(x, y, width, height));
}

/** Pointer-up: the finished stroke joins the pending batch. */
export function queueStroke(state: UiState, stroke: StrokePayload): UiState {
  if (stroke.points.length === 0) return state;
  return { ...state, pendingStrokes: [...state.pendingStrokes, stroke] };
}

/** Server acknowledged `count` pending strokes (in order). */
export function markCommitted(state: UiState, count: number): UiState {
  return {
    ...state,
    committedStrokes: [...state.committedStrokes, ...state.pendingStrokes.slice(0, count)],
    pendingStrokes: state.pendingStrokes.slice(count),
  };
}

export function clearStrokes(state: UiState): UiState {
  return { ...state, pendingStrokes: [], committedStrokes: [], lastStats: null };
}

function hasLabel(state: UiState, label: StrokeLabel): boolean {
  return (
    state.pendingStrokes.some((s) => s.label === label) ||
    state.committedStrokes.some((s) => s.label === label)
  );
}

/** The segment button enables once both classes have been drawn and no
 * request is already in flight. */
export function canSegment(state: UiState): boolean {
  return (
    state.sessionId !== null &&
    !state.segmentInFlight &&
    hasLabel(state, "fg") &&
    hasLabel(state, "bg")
  );
}
