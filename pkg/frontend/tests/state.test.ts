import { describe, expect, it } from "vitest";

import {
  STROKE_COLORS,
  beginStroke,
  canSegment,
  clampOpacity,
  clearStrokes,
  clipPoint,
  extendStroke,
  initialState,
  markCommitted,
  queueStroke,
  setOpacity,
  setSession,
} from "../src/state.js";

function withSession() {
  return setSession(initialState(), "abc123", 64, 64);
}

describe("opacity", () => {
  it("clamps into [0, 1]", () => {
    expect(clampOpacity(-0.5)).toBe(0);
    expect(clampOpacity(0.3)).toBe(0.3);
    expect(clampOpacity(7)).toBe(1);
    expect(clampOpacity(NaN)).toBe(0);
  });

  it("setOpacity applies the clamp", () => {
    expect(setOpacity(initialState(), 1.7).overlayOpacity).toBe(1);
  });
});

describe("stroke colors", () => {
  it("fg is red, bg is green", () => {
    expect(STROKE_COLORS.fg).toBe("#e53935");
    expect(STROKE_COLORS.bg).toBe("#43a047");
  });
});

describe("point clipping", () => {
  it("clips out-of-bounds points into the image", () => {
    expect(clipPoint(-5, 10, 64, 64)).toEqual([0, 10]);
    expect(clipPoint(100, -1, 64, 64)).toEqual([63, 0]);
    expect(clipPoint(30, 40, 64, 64)).toEqual([30, 40]);
  });

  it("extendStroke stores clipped points", () => {
    const stroke = beginStroke(withSession(), "fg");
    extendStroke(stroke, -10, 99, 64, 64);
    expect(stroke.points).toEqual([[0, 63]]);
  });
});

describe("pending stroke lifecycle", () => {
  it("queued strokes stay pending until acknowledged", () => {
    let state = withSession();
    const stroke = beginStroke(state, "fg");
    extendStroke(stroke, 1, 1, 64, 64);
    state = queueStroke(state, stroke);
    expect(state.pendingStrokes).toHaveLength(1);
    expect(state.committedStrokes).toHaveLength(0);
    state = markCommitted(state, 1);
    expect(state.pendingStrokes).toHaveLength(0);
    expect(state.committedStrokes).toHaveLength(1);
  });

  it("empty strokes are dropped, not queued", () => {
    const state = withSession();
    expect(queueStroke(state, beginStroke(state, "bg")).pendingStrokes).toHaveLength(0);
  });

  it("clear removes everything", () => {
    let state = withSession();
    const stroke = beginStroke(state, "fg");
    extendStroke(stroke, 1, 1, 64, 64);
    state = clearStrokes(queueStroke(state, stroke));
    expect(state.pendingStrokes).toHaveLength(0);
    expect(state.committedStrokes).toHaveLength(0);
  });
});

describe("segment gating", () => {
  it("requires one stroke of each label", () => {
    let state = withSession();
    expect(canSegment(state)).toBe(false);
    const fg = beginStroke(state, "fg");
    extendStroke(fg, 5, 5, 64, 64);
    state = queueStroke(state, fg);
    expect(canSegment(state)).toBe(false);
    const bg = beginStroke(state, "bg");
    extendStroke(bg, 50, 50, 64, 64);
    state = queueStroke(state, bg);
    expect(canSegment(state)).toBe(true);
  });

  it("disabled while a request is in flight or without a session", () => {
    let state = withSession();
    for (const label of ["fg", "bg"] as const) {
      const s = beginStroke(state, label);
      extendStroke(s, 5, 5, 64, 64);
      state = queueStroke(state, s);
    }
    expect(canSegment({ ...state, segmentInFlight: true })).toBe(false);
    expect(canSegment({ ...state, sessionId: null })).toBe(false);
  });
});
