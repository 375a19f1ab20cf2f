/**
 * Mask overlay: holds the server's PNG verbatim and composites it over
 * the image. The mask is never modified client-side; compositing reads
 * it and writes only into a separate output buffer.
 */

export interface OverlayColor {
  r: number;
  g: number;
  b: number;
}

export const FOREGROUND_TINT: OverlayColor = { r: 229, g: 57, b: 53 };

export class MaskOverlay {
  private png: Uint8Array | null = null;

  setMask(bytes: Uint8Array): void {
    this.png = bytes;
  }

  clear(): void {
    this.png = null;
  }

  get hasMask(): boolean {
    return this.png !== null;
  }

  /** The stored PNG, byte-for-byte as fetched. */
  get bytes(): Uint8Array | null {
    return this.png;
  }

  equals(other: Uint8Array | null): boolean {
    if (this.png === null || other === null) return this.png === other;
    if (this.png.length !== other.length) return false;
    for (let i = 0; i < other.length; i++) {
      if (this.png[i] !== other[i]) return false;
    }
    return true;
  }
}

/**
 * Blend a tint into base RGBA pixels wherever the mask is foreground
 * (255). Pure function: returns a new buffer, inputs untouched.
 *
 * opacity 0 leaves the image bit-identical; opacity 1 paints the tint.
 */
export function compositeMask(
  baseRgba: Uint8ClampedArray,
  maskGray: Uint8Array | Uint8ClampedArray,
  color: OverlayColor,
  opacity: number,
): Uint8ClampedArray {
  if (baseRgba.length !== maskGray.length * 4) {
    throw new Error(
      `mask size ${maskGray.length} does not match image pixel count ${baseRgba.length / 4}`,
    );
  }
  const out = new Uint8ClampedArray(baseRgba);
  if (opacity <= 0) return out;
  const a = Math.min(1, opacity);
  for (let p = 0; p < maskGray.length; p++) {
    if (maskGray[p] !== 255) continue;
    const i = p * 4;
    out[i] = Math.round(baseRgba[i] * (1 - a) + color.r * a);
    out[i + 1] = Math.round(baseRgba[i + 1] * (1 - a) + color.g * a);
    out[i + 2] = Math.round(baseRgba[i + 2] * (1 - a) + color.b * a);
  }
  return out;
}
