import { describe, expect, it } from "vitest";

import { FOREGROUND_TINT, MaskOverlay, compositeMask } from "../src/overlay.js";

describe("MaskOverlay", () => {
  it("stores bytes verbatim and compares exactly", () => {
    const overlay = new MaskOverlay();
    expect(overlay.hasMask).toBe(false);
    const bytes = new Uint8Array([1, 2, 3, 255]);
    overlay.setMask(bytes);
    expect(overlay.equals(new Uint8Array([1, 2, 3, 255]))).toBe(true);
    expect(overlay.equals(new Uint8Array([1, 2, 3, 254]))).toBe(false);
    expect(overlay.equals(new Uint8Array([1, 2, 3]))).toBe(false);
  });
});

describe("compositeMask", () => {
  const base = new Uint8ClampedArray([10, 20, 30, 255, 100, 110, 120, 255]);
  const mask = new Uint8Array([255, 0]);

  it("opacity zero leaves the image bit-identical", () => {
    const out = compositeMask(base, mask, FOREGROUND_TINT, 0);
    expect(Array.from(out)).toEqual(Array.from(base));
  });

  it("opacity one paints the tint on foreground pixels only", () => {
    const out = compositeMask(base, mask, { r: 200, g: 50, b: 25 }, 1);
    expect(Array.from(out.slice(0, 4))).toEqual([200, 50, 25, 255]);
    expect(Array.from(out.slice(4))).toEqual([100, 110, 120, 255]);
  });

  it("blends linearly at intermediate opacity", () => {
    const out = compositeMask(base, mask, { r: 210, g: 220, b: 230 }, 0.5);
    expect(Array.from(out.slice(0, 3))).toEqual([110, 120, 130]);
  });

  it("never mutates its inputs", () => {
    const baseCopy = new Uint8ClampedArray(base);
    const maskCopy = new Uint8Array(mask);
    compositeMask(base, mask, FOREGROUND_TINT, 0.7);
    expect(Array.from(base)).toEqual(Array.from(baseCopy));
    expect(Array.from(mask)).toEqual(Array.from(maskCopy));
  });

  it("rejects mismatched sizes", () => {
    expect(() => compositeMask(base, new Uint8Array(3), FOREGROUND_TINT, 1)).toThrow();
  });
});
